/** Chat pane: turn bubbles, highlight badges, and the confirm controls. */

import type { AgentResponse } from "./api.js";

export interface TurnOptions {
  /** body-part phrases shown as a badge under the bubble */
  badge?: string[];
}

export class ChatPane {
  readonly element: HTMLElement;
  private readonly turnList: HTMLElement;

  constructor() {
    this.element = document.createElement("div");
    this.element.className = "chat-pane";
    this.turnList = document.createElement("div");
    this.turnList.className = "turns";
    this.element.appendChild(this.turnList);
  }

  addUserTurn(text: string, options: TurnOptions = {}): void {
    this.addTurn("user", text, options);
  }

  addAgentTurn(response: AgentResponse, phraseFor: (regionId: string) => string): void {
    const badge = response.highlights.map(phraseFor);
    const turn = this.addTurn("agent", response.text, { badge });
    turn.dataset.kind = response.kind;
    turn.dataset.mode = response.mode_used;
  }

  addHint(text: string): void {
    const hint = document.createElement("div");
    hint.className = "hint";
    hint.textContent = text;
    this.turnList.appendChild(hint);
  }

  private addTurn(speaker: "user" | "agent", text: string, options: TurnOptions): HTMLElement {
    const turn = document.createElement("div");
    turn.className = `turn ${speaker}`;
    const bubble = document.createElement("div");
    bubble.className = "bubble";
    bubble.textContent = text;
    turn.appendChild(bubble);
    if (options.badge && options.badge.length > 0) {
      const badge = document.createElement("div");
      badge.className = "badge";
      badge.textContent = options.badge.slice().sort().join(", ");
      turn.appendChild(badge);
    }
    this.turnList.appendChild(turn);
    turn.scrollIntoView?.({ block: "end" });
    return turn;
  }

  get turns(): HTMLElement[] {
    return Array.from(this.turnList.querySelectorAll(".turn"));
  }
}
