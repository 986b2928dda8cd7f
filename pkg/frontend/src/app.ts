// Meeting-room single-page client: requirement form -> role selection ->
// live meeting room. DOM glue only; the behavior lives in api.ts,
// transcript.ts and autoAdvance.ts, where the tests exercise it.

import { MeetingApi } from "./api.js";
import { AutoAdvancer } from "./autoAdvance.js";
import { avatarFor } from "./avatars.js";
import { TranscriptStore } from "./transcript.js";
import {
  COMPLETED_STAGE,
  HUMAN_SPEAKER,
  STAGE_LABELS,
  STAGE_ORDER,
  type MessageDto,
  type RoleCardDto,
} from "./types.js";

const api = new MeetingApi("");
const app = document.getElementById("app")!;

const state = {
  meetingId: sessionStorage.getItem("meetingId") as string | null,
  roles: [] as RoleCardDto[],
  selected: new Set<string>(["product_manager", "design_director", "cmf_designer", "recorder"]),
  form: { topic: "", description: "", quantity: null as number | null },
  store: new TranscriptStore(),
  advancer: null as AutoAdvancer | null,
  abort: null as AbortController | null,
  names: new Map<string, string>(),
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

// ---------------------------------------------------------------- form page

function renderFormPage(): void {
  app.replaceChildren();
  const page = el("div", "page");
  page.append(el("h1", "", "New design meeting"));
  page.append(el("p", "hint", "Fill in the design requirement; it becomes the meeting topic."));

  const topic = el("input", "field") as HTMLInputElement;
  topic.placeholder = "Topic, e.g. three cups for young people in the office";
  const description = el("textarea", "field") as HTMLTextAreaElement;
  description.placeholder = "Description (optional)";
  const quantity = el("input", "field") as HTMLInputElement;
  quantity.type = "number";
  quantity.min = "1";
  quantity.placeholder = "Quantity (optional)";

  const next = el("button", "primary", "Choose the team");
  next.onclick = () => {
    if (!topic.value.trim()) {
      topic.classList.add("invalid");
      return;
    }
    state.form = {
      topic: topic.value.trim(),
      description: description.value.trim(),
      quantity: quantity.value ? Number(quantity.value) : null,
    };
    renderRolePage();
  };
  page.append(topic, description, quantity, next);
  app.append(page);
}

// ------------------------------------------------------------- role selection

async function renderRolePage(): Promise<void> {
  if (!state.roles.length) {
    state.roles = await api.getRoles();
  }
  app.replaceChildren();
  const page = el("div", "page");
  page.append(el("h1", "", "Select employees"));
  page.append(el("p", "hint", "The four core roles carry the SOP; summon others for extra voices."));

  const grid = el("div", "role-grid");
  for (const role of state.roles) {
    const card = el("div", "role-card");
    const avatar = avatarFor(role.id, role.name);
    const badge = el("div", "avatar", avatar.initials);
    badge.style.background = avatar.background;
    badge.style.color = avatar.foreground;
    card.append(badge, el("h3", "", role.name), el("div", "title", role.title),
                el("p", "resp", role.responsibilities));
    const toggle = () => {
      if (state.selected.has(role.id)) state.selected.delete(role.id);
      else state.selected.add(role.id);
      card.classList.toggle("selected", state.selected.has(role.id));
    };
    card.classList.toggle("selected", state.selected.has(role.id));
    card.onclick = toggle;
    grid.append(card);
  }
  const join = el("button", "primary", "Join Meeting Room");
  join.onclick = async () => {
    const meetingId = await api.createMeeting({
      form: state.form,
      role_ids: [...state.selected],
    });
    state.meetingId = meetingId;
    sessionStorage.setItem("meetingId", meetingId);
    renderMeetingRoom();
  };
  page.append(grid, join);
  app.append(page);
}

// --------------------------------------------------------------- meeting room

function bubbleFor(event: MessageDto): HTMLElement {
  const isHuman = event.speaker === HUMAN_SPEAKER;
  const row = el("div", `bubble-row ${isHuman ? "human" : "agent"}`);
  const name = state.names.get(event.speaker) ?? (isHuman ? "You" : event.speaker);
  const avatar = avatarFor(event.speaker, name);
  const badge = el("div", "avatar small", avatar.initials);
  badge.style.background = avatar.background;
  badge.style.color = avatar.foreground;

  const bubble = el("div", `bubble ${event.kind}`);
  bubble.dataset.seq = String(event.id);
  bubble.append(el("div", "speaker", `${name} · ${STAGE_LABELS[event.stage] ?? event.stage}`));
  const firstLine = event.content.split("\n")[0] ?? "";
  bubble.append(el("div", "content", event.kind === "artifact"
    ? `${firstLine} [${event.artifact?.kind}]`
    : event.content || "(image)"));
  for (const _ref of event.attachments) {
    bubble.append(el("div", "attachment", "(image attached)"));
  }
  row.append(badge, bubble);
  return row;
}

function renderStageIndicator(container: HTMLElement, stage: string): void {
  container.replaceChildren();
  for (const step of STAGE_ORDER) {
    const done = STAGE_ORDER.indexOf(step) < STAGE_ORDER.indexOf(stage);
    const cls = step === stage ? "stage current" : done ? "stage done" : "stage";
    container.append(el("span", cls, STAGE_LABELS[step] ?? step));
  }
}

async function renderMeetingRoom(): Promise<void> {
  const meetingId = state.meetingId!;
  const meeting = await api.getMeeting(meetingId);
  state.names = new Map(meeting.roster.map((r) => [r.id, r.name]));
  state.names.set(HUMAN_SPEAKER, "You");

  app.replaceChildren();
  const page = el("div", "page room");
  page.append(el("h1", "", meeting.form.topic));
  const stageBar = el("div", "stage-bar");
  renderStageIndicator(stageBar, meeting.stage);

  const log = el("div", "transcript");
  const controls = el("div", "controls");
  const autoToggle = el("button", "", "▶ Auto-advance");
  const stepButton = el("button", "", "Step one turn");
  const exportButton = el("button", "", "Export plan");
  controls.append(autoToggle, stepButton, exportButton);

  const chatBar = el("div", "chat-bar");
  const input = el("input", "chat-input") as HTMLInputElement;
  input.placeholder = "Type to steer the meeting…";
  const send = el("button", "primary", "Send");
  const upload = el("input") as HTMLInputElement; // image control right of the chat bar
  upload.type = "file";
  upload.accept = "image/*";
  upload.className = "upload";
  chatBar.append(input, send, upload);

  page.append(stageBar, log, controls, chatBar);
  app.append(page);

  // fresh store on every (re)load: replay from seq 1, render exactly once
  state.store = new TranscriptStore();
  state.store.onEvent((event) => {
    log.append(bubbleFor(event));
    log.scrollTop = log.scrollHeight;
    renderStageIndicator(stageBar, event.stage);
  });
  state.abort?.abort();
  state.abort = new AbortController();
  void api.streamEvents(meetingId, 1, (e) => state.store.insert(e), state.abort.signal);

  const advancer = new AutoAdvancer(api, meetingId, {
    onTurn: (stage) => {
      if (stage === COMPLETED_STAGE) autoToggle.textContent = "✓ Completed";
    },
  });
  state.advancer = advancer;
  input.addEventListener("focus", () => advancer.setTyping(true));
  input.addEventListener("blur", () => advancer.setTyping(false));

  autoToggle.onclick = () => {
    if (advancer.isRunning) {
      void advancer.stop();
      autoToggle.textContent = "▶ Auto-advance";
    } else {
      advancer.start();
      autoToggle.textContent = "⏸ Pause";
    }
  };
  stepButton.onclick = () => void api.advance(meetingId, 1);

  send.onclick = async () => {
    const text = input.value.trim();
    const file = upload.files?.[0];
    if (!text && !file) return;
    let imageB64: string | undefined;
    if (file) {
      const buf = new Uint8Array(await file.arrayBuffer());
      let binary = "";
      buf.forEach((byte) => (binary += String.fromCharCode(byte)));
      imageB64 = btoa(binary);
    }
    await api.postMessage(meetingId, text, imageB64, file?.type || "image/png");
    input.value = "";
    upload.value = "";
    advancer.setTyping(false);
  };
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") send.click();
  });

  exportButton.onclick = async () => {
    const bundle = await api.exportDocument(meetingId);
    const blob = new Blob([bundle.plan_md], { type: "text/markdown" });
    const link = el("a") as HTMLAnchorElement;
    link.href = URL.createObjectURL(blob);
    link.download = "plan.md";
    link.click();
    URL.revokeObjectURL(link.href);
  };
}

// ------------------------------------------------------------------- startup

if (state.meetingId) {
  // page reload mid-meeting: re-enter the room; the stream replays from seq 1
  void renderMeetingRoom().catch(() => {
    sessionStorage.removeItem("meetingId");
    state.meetingId = null;
    renderFormPage();
  });
} else {
  renderFormPage();
}
