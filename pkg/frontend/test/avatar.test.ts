import { beforeEach, describe, expect, it, vi } from "vitest";

import { Avatar } from "../src/avatar.js";
import { REGIONS } from "./mock_gateway.js";

describe("Avatar", () => {
  let clicks: Array<[string, string]>;
  let avatar: Avatar;

  beforeEach(() => {
    clicks = [];
    avatar = new Avatar((regionId, side) => clicks.push([regionId, side]));
    avatar.setRegions(REGIONS);
    document.body.replaceChildren(avatar.element);
  });

  it("creates one addressable shape per region and side", () => {
    const frontIds = Array.from(
      avatar.element.querySelectorAll(".avatar-view:first-of-type .avatar-region"),
    ).map((node) => (node as SVGElement).dataset.regionId);
    expect(frontIds).toContain("liver");
    expect(frontIds).toContain("eyes");
    expect(frontIds).not.toContain("buttocks"); // back-only region
    const allIds = Array.from(avatar.element.querySelectorAll(".avatar-region")).map(
      (node) => (node as SVGElement).dataset.regionId,
    );
    expect(allIds).toContain("buttocks");
  });

  it("skips regions without geometry with a console diagnostic", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const fresh = new Avatar(() => {});
    fresh.setRegions([{ region_id: "mystery", phrase: "mystery", side: "front" }]);
    expect(warn).toHaveBeenCalledWith(expect.stringContaining("mystery"));
    expect(fresh.element.querySelectorAll(".avatar-region")).toHaveLength(0);
    warn.mockRestore();
  });

  it("highlights known regions and flips to the hinted side", () => {
    avatar.setHighlights(["buttocks"], "back");
    expect(avatar.currentSide).toBe("back");
    const highlighted = Array.from(avatar.element.querySelectorAll(".highlighted")).map(
      (node) => (node as SVGElement).dataset.regionId,
    );
    expect(highlighted).toEqual(["buttocks"]);
  });

  it("drops unknown highlight ids with a diagnostic instead of crashing", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    avatar.setHighlights(["liver", "flux_capacitor"], "front");
    expect(warn).toHaveBeenCalledWith(expect.stringContaining("flux_capacitor"));
    expect([...avatar.highlightedRegions]).toEqual(["liver"]);
    const highlighted = avatar.element.querySelectorAll(".highlighted");
    expect(highlighted).toHaveLength(2); // liver is drawn on both views
    warn.mockRestore();
  });

  it("reports clicks with the side currently shown", () => {
    const liverFront = avatar.element.querySelector(
      '[data-region-id="liver"]',
    ) as SVGElement;
    liverFront.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(clicks).toEqual([["liver", "front"]]);
  });

  it("back view clicks carry side back", () => {
    avatar.showSide("back");
    const views = avatar.element.querySelectorAll(".avatar-view");
    const backView = views[1] as SVGElement;
    const backLiver = backView.querySelector('[data-region-id="liver"]') as SVGElement;
    backLiver.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(clicks).toEqual([["liver", "back"]]);
  });

  it("clearing highlights returns to the front view", () => {
    avatar.setHighlights(["buttocks"], "back");
    avatar.clearHighlights();
    expect(avatar.currentSide).toBe("front");
    expect(avatar.element.querySelectorAll(".highlighted")).toHaveLength(0);
  });
});
