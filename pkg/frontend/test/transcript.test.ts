import { describe, expect, it } from "vitest";

import { TranscriptStore } from "../src/transcript.js";
import { avatarFor } from "../src/avatars.js";
import type { MessageDto } from "../src/types.js";

function event(id: number, content = `msg ${id}`): MessageDto {
  return {
    id,
    speaker: id % 3 === 0 ? "HUMAN" : "product_manager",
    stage: "requirement_analysis",
    kind: "chat",
    content,
    attachments: [],
    timestamp: id,
    artifact: null,
  };
}

describe("TranscriptStore", () => {
  it("renders each event exactly once in id order under a 200-event replay", () => {
    const store = new TranscriptStore();
    const rendered: number[] = [];
    store.onEvent((e) => rendered.push(e.id));

    const events = Array.from({ length: 200 }, (_, i) => event(i + 1));
    // replay once, then replay the whole stream again (reconnect from seq 1)
    store.insertAll(events);
    store.insertAll(events);

    expect(rendered).toEqual(Array.from({ length: 200 }, (_, i) => i + 1));
    expect(store.size).toBe(200);
    expect(store.gapFree).toBe(true);
    expect(store.lastSeq).toBe(200);
  });

  it("drops duplicates arriving interleaved", () => {
    const store = new TranscriptStore();
    const rendered: number[] = [];
    store.onEvent((e) => rendered.push(e.id));
    store.insert(event(1));
    store.insert(event(1));
    store.insert(event(2));
    store.insert(event(2));
    store.insert(event(1));
    expect(rendered).toEqual([1, 2]);
  });

  it("parks out-of-order arrivals until the gap fills, never reordering", () => {
    const store = new TranscriptStore();
    const rendered: number[] = [];
    store.onEvent((e) => rendered.push(e.id));
    store.insert(event(2));
    store.insert(event(4));
    expect(rendered).toEqual([]);
    store.insert(event(1));
    expect(rendered).toEqual([1, 2]);
    store.insert(event(3));
    expect(rendered).toEqual([1, 2, 3, 4]);
    expect(store.gapFree).toBe(true);
  });

  it("resumeFrom points at the next sequence", () => {
    const store = new TranscriptStore();
    expect(store.resumeFrom).toBe(1);
    store.insertAll([event(1), event(2), event(3)]);
    expect(store.resumeFrom).toBe(4);
  });
});

describe("avatarFor", () => {
  it("is deterministic per role id", () => {
    const a = avatarFor("cmf_designer", "Xiao C");
    const b = avatarFor("cmf_designer", "Xiao C");
    expect(a).toEqual(b);
    expect(a.initials).toBe("XC");
    expect(a.hue).toBeGreaterThanOrEqual(0);
    expect(a.hue).toBeLessThan(360);
  });

  it("differs across roles", () => {
    expect(avatarFor("boss").hue).not.toBe(avatarFor("recorder").hue);
  });
});
