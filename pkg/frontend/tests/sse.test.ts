import { describe, expect, it } from "vitest";

import { SseParser, readSseStream } from "../src/sse.js";
import type { StreamFrame } from "../src/types.js";

const tokenFrame = (text: string) => `data: ${JSON.stringify({ type: "token", text })}\n\n`;

describe("SseParser", () => {
  it("parses a complete token frame", () => {
    const parser = new SseParser();
    expect(parser.push(tokenFrame("hello"))).toEqual([{ type: "token", text: "hello" }]);
  });

  it("parses several frames arriving in one chunk", () => {
    const parser = new SseParser();
    const frames = parser.push(tokenFrame("a") + tokenFrame("b") + 'data: {"type": "done"}\n\n');
    expect(frames).toEqual([
      { type: "token", text: "a" },
      { type: "token", text: "b" },
      { type: "done" },
    ]);
  });

  it("reassembles a frame split at arbitrary byte boundaries", () => {
    const wire = tokenFrame("split across reads") + 'data: {"type": "done"}\n\n';
    const parser = new SseParser();
    const frames: StreamFrame[] = [];
    for (const char of wire) {
      frames.push(...parser.push(char));
    }
    expect(frames).toEqual([{ type: "token", text: "split across reads" }, { type: "done" }]);
  });

  it("holds an incomplete frame until its blank line arrives", () => {
    const parser = new SseParser();
    expect(parser.push('data: {"type": "token", "text": "x"}')).toEqual([]);
    expect(parser.push("\n")).toEqual([]);
    expect(parser.push("\n")).toEqual([{ type: "token", text: "x" }]);
  });

  it("accepts CRLF line endings", () => {
    const parser = new SseParser();
    const frames = parser.push('data: {"type": "token", "text": "crlf"}\r\n\r\n');
    expect(frames).toEqual([{ type: "token", text: "crlf" }]);
  });

  it("ignores comment and event-name lines", () => {
    const parser = new SseParser();
    const frames = parser.push(': keepalive\nevent: message\ndata: {"type": "done"}\n\n');
    expect(frames).toEqual([{ type: "done" }]);
  });

  it("turns malformed JSON into an error frame instead of throwing", () => {
    const parser = new SseParser();
    const frames = parser.push("data: {nope\n\n");
    expect(frames).toHaveLength(1);
    expect(frames[0].type).toBe("error");
  });

  it("surfaces the error message from an error frame", () => {
    const parser = new SseParser();
    const frames = parser.push('data: {"type": "error", "message": "backend down"}\n\n');
    expect(frames).toEqual([{ type: "error", message: "backend down" }]);
  });

  it("flush() drains a trailing frame without a final blank line", () => {
    const parser = new SseParser();
    expect(parser.push('data: {"type": "done"}')).toEqual([]);
    expect(parser.flush()).toEqual([{ type: "done" }]);
    expect(parser.flush()).toEqual([]);
  });
});

describe("readSseStream", () => {
  const streamResponse = (chunks: string[]): Response => {
    const encoder = new TextEncoder();
    const body = new ReadableStream<Uint8Array>({
      start(controller) {
        for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
        controller.close();
      },
    });
    return new Response(body, {
      status: 200,
      headers: { "content-type": "text/event-stream" },
    });
  };

  it("invokes the callback per frame, in order, while reading", async () => {
    const wire = tokenFrame("T1 f") + tokenFrame("eeds") + 'data: {"type": "done"}\n\n';
    // Split mid-frame to force buffering across reads.
    const chunks = [wire.slice(0, 17), wire.slice(17, 40), wire.slice(40)];
    const seen: StreamFrame[] = [];
    const all = await readSseStream(streamResponse(chunks), (frame) => seen.push(frame));
    expect(seen).toEqual([
      { type: "token", text: "T1 f" },
      { type: "token", text: "eeds" },
      { type: "done" },
    ]);
    expect(all).toEqual(seen);
  });

  it("emits tokens before the stream has closed", async () => {
    const encoder = new TextEncoder();
    let releaseRest: () => void = () => {};
    const gate = new Promise<void>((resolve) => {
      releaseRest = resolve;
    });
    const body = new ReadableStream<Uint8Array>({
      async start(controller) {
        controller.enqueue(encoder.encode(tokenFrame("first")));
        await gate;
        controller.enqueue(encoder.encode('data: {"type": "done"}\n\n'));
        controller.close();
      },
    });
    const response = new Response(body, { status: 200 });

    const seen: string[] = [];
    const reading = readSseStream(response, (frame) => {
      seen.push(frame.type);
      if (frame.type === "token") {
        // The first token must arrive while the stream is still open —
        // i.e. before we have allowed the server to send "done".
        expect(seen).toEqual(["token"]);
        releaseRest();
      }
    });
    const frames = await reading;
    expect(seen).toEqual(["token", "done"]);
    expect(frames).toHaveLength(2);
  });
});
