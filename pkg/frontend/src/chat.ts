/** Streaming chat transcript.
 *
 * Tokens are appended to the assistant bubble as each stream frame is
 * parsed, so the answer is visible while the response is still open.
 * After every frame finishes rendering, onFrameRendered reports the
 * frame plus the transcript's DOM text at that instant — the hook the
 * tests use to prove the first token is on screen before "done".
 */

import { ApiClient, ApiError } from "./api.js";
import type { HistoryMessage, StreamFrame } from "./types.js";

export interface ChatFrameSnapshot {
  frame: StreamFrame;
  /** Transcript text content at the moment this frame finished rendering. */
  transcriptText: string;
}

export interface ChatControllerOptions {
  api: ApiClient;
  sessionId: string;
  container: HTMLElement;
  onFrameRendered?: (snapshot: ChatFrameSnapshot) => void;
  onBusyChange?: (busy: boolean) => void;
}

export class ChatController {
  readonly transcript: HTMLElement;
  private readonly api: ApiClient;
  private readonly sessionId: string;
  private readonly onFrameRendered?: (snapshot: ChatFrameSnapshot) => void;
  private readonly onBusyChange?: (busy: boolean) => void;
  private streaming = false;

  constructor(options: ChatControllerOptions) {
    this.api = options.api;
    this.sessionId = options.sessionId;
    this.onFrameRendered = options.onFrameRendered;
    this.onBusyChange = options.onBusyChange;
    this.transcript = document.createElement("div");
    this.transcript.className = "chat-transcript";
    options.container.appendChild(this.transcript);
  }

  get busy(): boolean {
    return this.streaming;
  }

  /** Replace the transcript with a session's stored history. */
  loadHistory(messages: HistoryMessage[]): void {
    this.transcript.textContent = "";
    for (const message of messages) {
      this.appendBubble(message.role, message.content);
    }
  }

  /** Send a question and stream the answer into a new assistant bubble. */
  async ask(question: string): Promise<void> {
    const trimmed = question.trim();
    if (!trimmed) return;
    if (this.streaming) {
      throw new Error("a question is already streaming");
    }
    this.setBusy(true);
    this.appendBubble("user", trimmed);
    const bubble = this.appendBubble("assistant", "");
    bubble.classList.add("streaming");

    try {
      await this.api.askQuestion(this.sessionId, trimmed, (frame) => {
        this.renderFrame(bubble, frame);
        this.onFrameRendered?.({
          frame,
          transcriptText: this.transcript.textContent ?? "",
        });
      });
      bubble.classList.remove("streaming");
    } catch (error) {
      bubble.classList.remove("streaming");
      bubble.classList.add("error");
      if (error instanceof ApiError) {
        bubble.textContent = `request failed (${error.status}): ${error.message}`;
      } else {
        bubble.textContent = `stream interrupted: ${String(error)}`;
      }
    } finally {
      this.setBusy(false);
    }
  }

  private renderFrame(bubble: HTMLElement, frame: StreamFrame): void {
    if (frame.type === "token") {
      bubble.textContent = (bubble.textContent ?? "") + frame.text;
    } else if (frame.type === "error") {
      bubble.classList.remove("streaming");
      bubble.classList.add("error");
      const note = document.createElement("span");
      note.className = "stream-error-note";
      note.textContent = ` [error: ${frame.message}]`;
      bubble.appendChild(note);
    }
    // "done" changes no text; the bubble already holds the full answer.
  }

  private appendBubble(role: "user" | "assistant", text: string): HTMLElement {
    const bubble = document.createElement("div");
    bubble.className = `msg ${role}`;
    bubble.textContent = text;
    this.transcript.appendChild(bubble);
    return bubble;
  }

  private setBusy(busy: boolean): void {
    this.streaming = busy;
    this.onBusyChange?.(busy);
  }
}
