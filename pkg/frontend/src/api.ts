// Thin client over the meeting server. Every UI action maps 1:1 to one of
// these calls; there is no hidden client-side state mutation.

import type {
  AdvanceResponse,
  ExportBundle,
  MeetingDto,
  MessageDto,
  RoleCardDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    const text = await response.text();
    throw new ApiError(response.status, `${response.status}: ${text}`);
  }
  return response.json() as Promise<T>;
}

export interface CreateMeetingInput {
  form: { topic: string; description?: string; constraints?: string[]; quantity?: number | null };
  role_ids?: string[];
  config?: Record<string, unknown>;
}

export class MeetingApi {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(this.url("/health"));
      return response.ok;
    } catch {
      return false;
    }
  }

  async getRoles(): Promise<RoleCardDto[]> {
    const data = await asJson<{ roles: RoleCardDto[] }>(await fetch(this.url("/roles")));
    return data.roles;
  }

  async createMeeting(input: CreateMeetingInput): Promise<string> {
    const response = await fetch(this.url("/meetings"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(input),
    });
    const data = await asJson<{ meeting_id: string }>(response);
    return data.meeting_id;
  }

  async getMeeting(meetingId: string): Promise<MeetingDto> {
    return asJson<MeetingDto>(await fetch(this.url(`/meetings/${meetingId}`)));
  }

  async postMessage(
    meetingId: string,
    text: string,
    imageB64?: string,
    imageMediaType = "image/png",
  ): Promise<number> {
    const body: Record<string, unknown> = { text };
    if (imageB64) {
      body.image_b64 = imageB64;
      body.image_media_type = imageMediaType;
    }
    const response = await fetch(this.url(`/meetings/${meetingId}/messages`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const data = await asJson<{ seq: number }>(response);
    return data.seq;
  }

  async advance(meetingId: string, turns = 1): Promise<AdvanceResponse> {
    const response = await fetch(this.url(`/meetings/${meetingId}/advance`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ turns }),
    });
    return asJson<AdvanceResponse>(response);
  }

  async runToCompletion(meetingId: string): Promise<AdvanceResponse> {
    const response = await fetch(this.url(`/meetings/${meetingId}/advance`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ run_to_completion: true }),
    });
    return asJson<AdvanceResponse>(response);
  }

  async exportDocument(meetingId: string): Promise<ExportBundle> {
    return asJson<ExportBundle>(await fetch(this.url(`/meetings/${meetingId}/export`)));
  }

  /**
   * Subscribe to the NDJSON event stream, replaying from `fromSeq` and then
   * following live appends. Resolves when the server closes the stream
   * (meeting completed) or the signal aborts.
   */
  async streamEvents(
    meetingId: string,
    fromSeq: number,
    onEvent: (event: MessageDto) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await fetch(
      this.url(`/meetings/${meetingId}/events?from_seq=${fromSeq}`),
      { signal },
    );
    if (!response.ok || !response.body) {
      throw new ApiError(response.status, `event stream failed: ${response.status}`);
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    try {
      while (true) {
        const { done, value } = await reader.read();
        if (done) break;
        buffer += decoder.decode(value, { stream: true });
        const lines = buffer.split("\n");
        buffer = lines.pop() ?? "";
        for (const line of lines) {
          if (!line.trim()) continue;
          onEvent(JSON.parse(line) as MessageDto);
        }
      }
      if (buffer.trim()) {
        onEvent(JSON.parse(buffer) as MessageDto);
      }
    } catch (err) {
      if (signal?.aborted) return;
      throw err;
    }
  }
}
