/** UI state machine mirroring the dialog states.
 *
 * Exactly one of the text input or the yes/no confirm buttons is enabled at
 * any time; while a request is in flight both stay disabled (at most one
 * in-flight request per session).
 */

import type { ResponseKind } from "./api.js";

export type UiPhase = "input" | "confirm" | "busy";

export interface ControlState {
  inputEnabled: boolean;
  confirmEnabled: boolean;
}

export class UiStateMachine {
  private phase: UiPhase = "input";
  private phaseBeforeBusy: Exclude<UiPhase, "busy"> = "input";

  get current(): UiPhase {
    return this.phase;
  }

  controls(): ControlState {
    return {
      inputEnabled: this.phase === "input",
      confirmEnabled: this.phase === "confirm",
    };
  }

  /** A click on the avatar is allowed only while free-text input is. */
  canPoint(): boolean {
    return this.phase === "input";
  }

  beginRequest(): void {
    if (this.phase === "busy") {
      throw new Error("a request is already in flight");
    }
    this.phaseBeforeBusy = this.phase;
    this.phase = "busy";
  }

  /** Apply the agent's response kind; confirm questions await yes/no. */
  completeRequest(kind: ResponseKind): void {
    this.phase = kind === "confirm_question" ? "confirm" : "input";
  }

  /** A failed request restores the controls that were live before it. */
  failRequest(): void {
    this.phase = this.phaseBeforeBusy;
  }
}
