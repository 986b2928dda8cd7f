// End-to-end against the real meeting server running mock backends:
// create -> auto-advance -> interject -> export, then a simulated page
// reload that re-streams the transcript from seq 1 with no gaps.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { MeetingApi } from "../src/api.js";
import { AutoAdvancer } from "../src/autoAdvance.js";
import { TranscriptStore } from "../src/transcript.js";
import { COMPLETED_STAGE, HUMAN_SPEAKER, type MessageDto } from "../src/types.js";

const PORT = 8930 + (process.pid % 50);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let dataDir: string;
const api = new MeetingApi(BASE);

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "studiomeet-e2e-"));
  server = spawn(
    "python3",
    ["-m", "studiomeet.service", "--root", dataDir, "--port", String(PORT), "--seed", "5"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const stderr: string[] = [];
  server.stderr?.on("data", (chunk) => stderr.push(String(chunk)));
  for (let attempt = 0; attempt < 100; attempt++) {
    if (await api.health()) return;
    if (server.exitCode !== null) {
      throw new Error(`server exited early: ${stderr.join("")}`);
    }
    await sleep(100);
  }
  throw new Error(`server never became healthy: ${stderr.join("")}`);
}, 20000);

afterAll(async () => {
  server?.kill();
  await sleep(100);
  rmSync(dataDir, { recursive: true, force: true });
});

describe("meeting room end to end", () => {
  it("creates, auto-advances, interjects, exports, and survives a reload", async () => {
    const roles = await api.getRoles();
    expect(roles).toHaveLength(7);
    expect(roles.map((r) => r.name)).toContain("Xiao A");

    const meetingId = await api.createMeeting({
      form: { topic: "three cups for young people in the office", quantity: 3 },
      role_ids: ["product_manager", "design_director", "cmf_designer", "recorder"],
      config: { max_turns_per_stage: 3, seed: 5, image_size: 32 },
    });
    expect(meetingId).toBeTruthy();

    // live subscription, as the meeting-room view does on entry
    const live = new TranscriptStore();
    const liveDone = api.streamEvents(meetingId, 1, (e) => live.insert(e));

    // a couple of manual turns, then the human interjects, then auto-advance
    await api.advance(meetingId, 1);
    const interjection = "make Scheme 1 more innovative";
    await api.postMessage(meetingId, interjection);

    const advancer = new AutoAdvancer(api, meetingId, { intervalMs: 0 });
    advancer.start();
    await advancer.whenSettled();

    const snapshot = await api.getMeeting(meetingId);
    expect(snapshot.stage).toBe(COMPLETED_STAGE);
    await liveDone; // server closes the stream once the meeting completes

    // the interjection is in the transcript and influenced later prompts
    const humanMsgs = live.events.filter((e) => e.speaker === HUMAN_SPEAKER && e.kind === "chat");
    expect(humanMsgs.map((e) => e.content)).toContain(interjection);
    expect(live.gapFree).toBe(true);
    expect(live.size).toBe(snapshot.transcript.length);

    // export downloads the plan bundle
    const bundle = await api.exportDocument(meetingId);
    expect(bundle.plan_md.startsWith("# Design Plan:")).toBe(true);
    expect(bundle.plan_md).toContain(interjection);
    expect(bundle.plan_json.stage).toBe(COMPLETED_STAGE);
    expect(bundle.images.length).toBeGreaterThan(0);

    // forced reload: a fresh store re-streams from seq 1, gap-free
    const reloaded = new TranscriptStore();
    await api.streamEvents(meetingId, 1, (e) => reloaded.insert(e));
    expect(reloaded.gapFree).toBe(true);
    expect(reloaded.events.map((e) => e.id)).toEqual(live.events.map((e) => e.id));
    expect(reloaded.events).toEqual(live.events);
  }, 30000);

  it("resumes a stream from the middle with ?from_seq=", async () => {
    const meetingId = await api.createMeeting({
      form: { topic: "resumable stream check" },
      config: { max_turns_per_stage: 1, seed: 9, image_size: 32 },
    });
    const advancer = new AutoAdvancer(api, meetingId, { intervalMs: 0 });
    advancer.start();
    await advancer.whenSettled();

    const head = new TranscriptStore();
    await api.streamEvents(meetingId, 1, (e) => head.insert(e));
    const tailEvents: MessageDto[] = [];
    await api.streamEvents(meetingId, 4, (e) => tailEvents.push(e));
    expect(tailEvents[0]?.id).toBe(4);
    expect(tailEvents.map((e) => e.id)).toEqual(
      head.events.filter((e) => e.id >= 4).map((e) => e.id),
    );
  }, 30000);

  it("pauses auto-advance while the designer is typing", async () => {
    const meetingId = await api.createMeeting({
      form: { topic: "typing pause check" },
      config: { max_turns_per_stage: 2, seed: 3, image_size: 32 },
    });
    const advancer = new AutoAdvancer(api, meetingId, { intervalMs: 0 });
    advancer.setTyping(true);
    advancer.start();
    await sleep(250);
    const during = await api.getMeeting(meetingId);
    expect(during.transcript.length).toBe(1); // nothing advanced while typing
    advancer.setTyping(false);
    await advancer.whenSettled();
    const after = await api.getMeeting(meetingId);
    expect(after.stage).toBe(COMPLETED_STAGE);
  }, 30000);
});
