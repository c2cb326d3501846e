/** Incremental parser for the service's server-sent event stream.
 *
 * The wire format is text/event-stream where every frame is a single
 * `data: <json>` line followed by a blank line, and the JSON carries a
 * `type` discriminator: {"type":"token","text":...} per answer chunk,
 * then {"type":"done"} — or {"type":"error","message":...} and no done.
 * Frames may arrive split across reads at any byte boundary.
 */

import type { StreamFrame } from "./types.js";

export class SseParser {
  private buffer = "";

  /** Feed a decoded chunk; returns every frame completed by it. */
  push(chunk: string): StreamFrame[] {
    this.buffer += chunk;
    const frames: StreamFrame[] = [];
    // A frame ends at a blank line; tolerate \n\n and \r\n\r\n.
    const parts = this.buffer.split(/\r?\n\r?\n/);
    this.buffer = parts.pop() ?? "";
    for (const part of parts) {
      const frame = this.parseFrame(part);
      if (frame) frames.push(frame);
    }
    return frames;
  }

  /** Parse whatever remains after the stream closes (normally nothing). */
  flush(): StreamFrame[] {
    const rest = this.buffer;
    this.buffer = "";
    if (!rest.trim()) return [];
    const frame = this.parseFrame(rest);
    return frame ? [frame] : [];
  }

  private parseFrame(block: string): StreamFrame | null {
    const dataLines: string[] = [];
    for (const rawLine of block.split(/\r?\n/)) {
      const line = rawLine.replace(/\r$/, "");
      if (line.startsWith("data:")) {
        dataLines.push(line.slice(5).replace(/^ /, ""));
      }
      // event:/id:/retry:/comment lines carry nothing in this protocol.
    }
    if (dataLines.length === 0) return null;
    const text = dataLines.join("\n");
    let payload: unknown;
    try {
      payload = JSON.parse(text);
    } catch {
      return { type: "error", message: `unparseable stream frame: ${text}` };
    }
    return coerceFrame(payload);
  }
}

function coerceFrame(payload: unknown): StreamFrame {
  if (typeof payload === "object" && payload !== null) {
    const frame = payload as { type?: unknown; text?: unknown; message?: unknown };
    if (frame.type === "token" && typeof frame.text === "string") {
      return { type: "token", text: frame.text };
    }
    if (frame.type === "done") {
      return { type: "done" };
    }
    if (frame.type === "error") {
      return { type: "error", message: String(frame.message ?? "stream error") };
    }
  }
  return { type: "error", message: `unexpected stream frame: ${JSON.stringify(payload)}` };
}

/** Read a streaming Response body, invoking onFrame as each frame completes.
 *
 * onFrame fires synchronously per frame, in order, before the next read —
 * callers see every token while the stream is still open.
 */
export async function readSseStream(
  response: Response,
  onFrame: (frame: StreamFrame) => void,
): Promise<StreamFrame[]> {
  if (!response.body) throw new Error("response has no body to stream");
  const reader = response.body.getReader();
  const decoder = new TextDecoder("utf-8");
  const parser = new SseParser();
  const seen: StreamFrame[] = [];
  const emit = (frame: StreamFrame) => {
    seen.push(frame);
    onFrame(frame);
  };
  for (;;) {
    const { value, done } = await reader.read();
    if (done) break;
    for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
      emit(frame);
    }
  }
  const tail = decoder.decode();
  if (tail) {
    for (const frame of parser.push(tail)) emit(frame);
  }
  for (const frame of parser.flush()) emit(frame);
  return seen;
}
