/** Application shell: wires the gateway client, chat pane, avatar, and the
 * input/confirm control state machine into one page.
 *
 * Nothing is persisted client-side; the conversation lives only in the DOM
 * of the open page.
 */

import { GatewayClient, GatewayError, type AgentResponse, type Region } from "./api.js";
import { Avatar, type ViewSide } from "./avatar.js";
import { ChatPane } from "./chat.js";
import { UiStateMachine } from "./state.js";

export class App {
  readonly element: HTMLElement;
  readonly chat: ChatPane;
  readonly avatar: Avatar;
  readonly state = new UiStateMachine();

  private readonly input: HTMLInputElement;
  private readonly sendButton: HTMLButtonElement;
  private readonly yesButton: HTMLButtonElement;
  private readonly noButton: HTMLButtonElement;
  private sessionId: string | null = null;
  private regions: Region[] = [];

  constructor(private readonly client: GatewayClient) {
    this.element = document.createElement("div");
    this.element.className = "app";

    this.chat = new ChatPane();
    this.avatar = new Avatar((regionId, side) => {
      void this.pointAt(regionId, side);
    });

    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.placeholder = "Ask a question, or click the avatar";
    this.input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") {
        void this.sendCurrentInput();
      }
    });
    this.sendButton = this.makeButton("send", () => void this.sendCurrentInput());
    this.yesButton = this.makeButton("yes", () => void this.confirm(true));
    this.noButton = this.makeButton("no", () => void this.confirm(false));
    this.yesButton.classList.add("confirm");
    this.noButton.classList.add("confirm");

    const controls = document.createElement("div");
    controls.className = "controls";
    controls.append(this.input, this.sendButton, this.yesButton, this.noButton);

    const main = document.createElement("div");
    main.className = "main";
    main.append(this.chat.element, this.avatar.element);
    this.element.append(main, controls);
    this.applyControlState();
  }

  private makeButton(label: string, onClick: () => void): HTMLButtonElement {
    const button = document.createElement("button");
    button.type = "button";
    button.textContent = label;
    button.addEventListener("click", onClick);
    return button;
  }

  /** Fetch the lexicon regions and open a session. */
  async start(): Promise<void> {
    this.regions = await this.client.fetchRegions();
    this.avatar.setRegions(this.regions);
    this.sessionId = await this.client.createSession();
  }

  private phraseFor(regionId: string): string {
    return this.regions.find((r) => r.region_id === regionId)?.phrase ?? regionId;
  }

  async sendCurrentInput(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || !this.state.controls().inputEnabled) {
      return;
    }
    this.input.value = "";
    this.chat.addUserTurn(text);
    await this.roundTrip(() => this.client.sendMessage(this.requireSession(), text));
  }

  async confirm(affirmed: boolean): Promise<void> {
    if (!this.state.controls().confirmEnabled) {
      return;
    }
    this.chat.addUserTurn(affirmed ? "yes" : "no");
    await this.roundTrip(() => this.client.sendConfirm(this.requireSession(), affirmed));
  }

  async pointAt(regionId: string, side: ViewSide): Promise<void> {
    if (!this.state.canPoint()) {
      this.chat.addHint("please answer the question first (yes or no)");
      return;
    }
    this.chat.addUserTurn("I am not feeling well here", { badge: [this.phraseFor(regionId)] });
    await this.roundTrip(() => this.client.sendPoint(this.requireSession(), regionId, side));
  }

  private requireSession(): string {
    if (this.sessionId === null) {
      throw new Error("session not started");
    }
    return this.sessionId;
  }

  private async roundTrip(request: () => Promise<AgentResponse>): Promise<void> {
    this.state.beginRequest();
    this.applyControlState();
    try {
      const response = await request();
      this.chat.addAgentTurn(response, (id) => this.phraseFor(id));
      if (response.kind === "answer" && response.highlights.length > 0) {
        this.avatar.setHighlights(response.highlights, response.side_hint);
      } else if (response.kind === "answer" || response.kind === "fallback") {
        this.avatar.clearHighlights();
      }
      this.state.completeRequest(response.kind);
    } catch (error) {
      this.state.failRequest();
      const message =
        error instanceof GatewayError ? `${error.code}: ${error.message}` : String(error);
      this.chat.addHint(`request failed - ${message}`);
    } finally {
      this.applyControlState();
    }
  }

  applyControlState(): void {
    const controls = this.state.controls();
    this.input.disabled = !controls.inputEnabled;
    this.sendButton.disabled = !controls.inputEnabled;
    this.yesButton.disabled = !controls.confirmEnabled;
    this.noButton.disabled = !controls.confirmEnabled;
    this.yesButton.style.display = controls.confirmEnabled ? "" : "none";
    this.noButton.style.display = controls.confirmEnabled ? "" : "none";
  }
}
