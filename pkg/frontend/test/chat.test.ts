import { beforeEach, describe, expect, it } from "vitest";

import { ChatPane } from "../src/chat.js";
import { answer } from "./mock_gateway.js";

describe("ChatPane", () => {
  let pane: ChatPane;

  beforeEach(() => {
    pane = new ChatPane();
    document.body.replaceChildren(pane.element);
  });

  it("renders turns in order with speakers", () => {
    pane.addUserTurn("What is cirrhosis?");
    pane.addAgentTurn(answer(), (id) => id);
    const turns = pane.turns;
    expect(turns).toHaveLength(2);
    expect(turns[0]?.className).toContain("user");
    expect(turns[1]?.className).toContain("agent");
    expect(turns[1]?.textContent).toContain("scarring of the liver");
  });

  it("agent answers with highlights carry a body-part badge", () => {
    pane.addAgentTurn(answer({ highlights: ["liver", "stomach"] }), (id) => `<${id}>`);
    const badge = pane.element.querySelector(".badge");
    expect(badge?.textContent).toBe("<liver>, <stomach>");
  });

  it("fallback turns render as plain bubbles without badges", () => {
    pane.addAgentTurn(
      answer({ kind: "fallback", mode_used: "chat", highlights: [], text: "I hear you." }),
      (id) => id,
    );
    expect(pane.element.querySelector(".badge")).toBeNull();
    const turn = pane.turns[0];
    expect(turn?.dataset.kind).toBe("fallback");
    expect(turn?.textContent).toBe("I hear you.");
  });

  it("user point turns show the clicked body part as a badge", () => {
    pane.addUserTurn("I am not feeling well here", { badge: ["liver"] });
    const badge = pane.element.querySelector(".turn.user .badge");
    expect(badge?.textContent).toBe("liver");
  });

  it("hints render outside the turn stream", () => {
    pane.addHint("please answer the question first (yes or no)");
    expect(pane.turns).toHaveLength(0);
    expect(pane.element.querySelector(".hint")?.textContent).toContain("yes or no");
  });
});
