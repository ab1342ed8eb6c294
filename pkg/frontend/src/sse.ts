// Server-sent event consumption over fetch streaming (works in browsers and
// in node test runs alike, no EventSource dependency). If the stream drops
// before the terminal event, callers fall back to polling run status.

import type { RunEventDoc } from "./types";

export interface SseSubscription {
  done: Promise<"terminal" | "dropped">;
  close(): void;
}

export function parseSseChunk(buffer: string): { events: string[]; rest: string } {
  const events: string[] = [];
  let rest = buffer;
  for (;;) {
    const cut = rest.indexOf("\n\n");
    if (cut < 0) break;
    events.push(rest.slice(0, cut));
    rest = rest.slice(cut + 2);
  }
  return { events, rest };
}

export function parseEventBlock(block: string): RunEventDoc | null {
  let data = "";
  for (const line of block.split("\n")) {
    if (line.startsWith("data: ")) data += line.slice(6);
  }
  if (!data) return null;
  try {
    return JSON.parse(data) as RunEventDoc;
  } catch {
    return null;
  }
}

export function subscribeEvents(
  url: string,
  onEvent: (event: RunEventDoc) => void,
): SseSubscription {
  const controller = new AbortController();
  const done = (async (): Promise<"terminal" | "dropped"> => {
    try {
      const response = await fetch(url, {
        headers: { accept: "text/event-stream" },
        signal: controller.signal,
      });
      if (!response.ok || !response.body) return "dropped";
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      let buffer = "";
      let sawTerminal = false;
      for (;;) {
        const { done: finished, value } = await reader.read();
        if (finished) break;
        buffer += decoder.decode(value, { stream: true });
        const { events, rest } = parseSseChunk(buffer);
        buffer = rest;
        for (const block of events) {
          const event = parseEventBlock(block);
          if (!event) continue;
          onEvent(event);
          if (event.event === "run_finished") sawTerminal = true;
        }
      }
      return sawTerminal ? "terminal" : "dropped";
    } catch {
      return "dropped";
    }
  })();
  return { done, close: () => controller.abort() };
}
