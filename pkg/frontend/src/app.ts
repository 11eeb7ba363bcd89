// Chat UI: transcript bubbles annotated with detected (orange) and target
// (teal) badges plus a compliance check per agent turn. Pure API client —
// badge text is rendered verbatim from service payloads.

import { ApiClient, ApiError, TranscriptTurn } from "./api.js";

export interface ChatApp {
  start(ontology: string, strategy: string): Promise<void>;
  submit(): Promise<void>;
  reload(): Promise<void>;
  readonly sessionId: string | null;
}

interface TurnView {
  role: "user" | "agent";
  text: string;
  detected: string | null;
  target: string | null;
  compliant: boolean | null;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBubble(doc: Document, view: TurnView): HTMLElement {
  const bubble = el(doc, "div", `bubble ${view.role}`);
  bubble.appendChild(el(doc, "div", "text", view.text));
  const badges = el(doc, "div", "badges");
  if (view.detected !== null) {
    badges.appendChild(el(doc, "span", "badge detected", view.detected));
  }
  if (view.role === "agent" && view.target !== null) {
    badges.appendChild(el(doc, "span", "badge target", view.target));
    const mark = el(
      doc,
      "span",
      view.compliant ? "compliant yes" : "compliant no",
      view.compliant ? "✓" : "✗"
    );
    if (!view.compliant) {
      mark.title = `detected ${view.detected} ≠ target ${view.target}`;
    }
    badges.appendChild(mark);
  }
  bubble.appendChild(badges);
  return bubble;
}

export function createChatApp(root: HTMLElement, api: ApiClient): ChatApp {
  const doc = root.ownerDocument;
  root.innerHTML = "";

  const banner = el(doc, "div", "banner hidden");
  const header = el(doc, "div", "header hidden");
  const legend = el(doc, "div", "legend");
  header.appendChild(legend);
  const transcript = el(doc, "div", "transcript");
  const form = el(doc, "form", "composer");
  const input = el(doc, "input", "input") as HTMLInputElement;
  input.type = "text";
  input.placeholder = "Say something…";
  const send = el(doc, "button", "send", "Send");
  send.type = "submit";
  send.disabled = true;
  form.append(input, send);
  root.append(banner, header, transcript, form);

  let sessionId: string | null = null;
  let pending = false; // one in-flight turn; no optimistic rendering

  function refreshControls(): void {
    send.disabled = pending || sessionId === null || input.value.trim() === "";
    input.disabled = pending;
  }

  function showBanner(message: string, retry: () => Promise<void>): void {
    banner.innerHTML = "";
    banner.className = "banner error";
    banner.appendChild(el(doc, "span", "message", message));
    const button = el(doc, "button", "retry", "Retry");
    button.type = "button";
    button.addEventListener("click", () => void retry());
    banner.appendChild(button);
  }

  function clearBanner(): void {
    banner.innerHTML = "";
    banner.className = "banner hidden";
  }

  function appendErrorChip(message: string, retry: () => Promise<void>): void {
    const chip = el(doc, "div", "chip error");
    chip.appendChild(el(doc, "span", "message", message));
    const button = el(doc, "button", "retry", "Retry");
    button.type = "button";
    button.addEventListener("click", () => {
      chip.remove();
      void retry();
    });
    chip.appendChild(button);
    transcript.appendChild(chip);
  }

  function appendTurn(view: TurnView): void {
    transcript.appendChild(renderBubble(doc, view));
  }

  async function start(ontology: string, strategy: string): Promise<void> {
    try {
      const session = await api.createSession(ontology, strategy);
      sessionId = session.id;
      clearBanner();
      header.className = "header";
      legend.innerHTML = "";
      legend.appendChild(el(doc, "span", "strategy", strategy));
      for (const cls of session.classes) {
        legend.appendChild(el(doc, "span", "legend-class", cls));
      }
      transcript.innerHTML = "";
    } catch (error) {
      showBanner(
        error instanceof ApiError ? error.message : "service unreachable",
        () => start(ontology, strategy)
      );
    }
    refreshControls();
  }

  async function sendText(text: string): Promise<void> {
    if (sessionId === null || pending) return;
    pending = true;
    refreshControls();
    try {
      const turn = await api.postTurn(sessionId, text);
      appendTurn({
        role: "user",
        text,
        detected: turn.detected,
        target: null,
        compliant: null,
      });
      appendTurn({
        role: "agent",
        text: turn.reply,
        detected: turn.reply_detected,
        target: turn.target,
        compliant: turn.compliant,
      });
    } catch (error) {
      if (error instanceof ApiError && error.status === 502) {
        // the service kept the user turn; render it plus a retry chip
        appendTurn({
          role: "user",
          text,
          detected: null,
          target: null,
          compliant: null,
        });
        appendErrorChip(error.message, () => sendText(text));
      } else {
        showBanner(
          error instanceof ApiError ? error.message : "service unreachable",
          async () => clearBanner()
        );
      }
    } finally {
      pending = false;
      refreshControls();
    }
  }

  async function submit(): Promise<void> {
    const text = input.value.trim();
    if (text === "") return;
    input.value = "";
    await sendText(text);
  }

  async function reload(): Promise<void> {
    if (sessionId === null) return;
    const doc = await api.transcript(sessionId);
    transcript.innerHTML = "";
    for (const turn of doc.turns as TranscriptTurn[]) {
      appendTurn(turn);
    }
  }

  input.addEventListener("input", refreshControls);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void submit();
  });
  refreshControls();

  return {
    start,
    submit,
    reload,
    get sessionId() {
      return sessionId;
    },
  };
}
