/** Two-view clickable avatar.
 *
 * Shapes are created only for regions the gateway reports, so the region-id
 * contract always matches the server lexicon. Unknown highlight ids coming
 * back in a response are dropped with a console diagnostic, never a crash.
 */

import type { Region, SideName } from "./api.js";
import { BODY_OUTLINE, REGION_GEOMETRY, VIEWBOX, type RegionShape } from "./coords.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export type ViewSide = "front" | "back";

export type RegionClickHandler = (regionId: string, side: ViewSide) => void;

export class Avatar {
  readonly element: HTMLElement;
  private readonly views: Record<ViewSide, SVGSVGElement>;
  private readonly shapes: Record<ViewSide, Map<string, SVGElement>>;
  private readonly toggle: HTMLButtonElement;
  private readonly caption: HTMLElement;
  private side: ViewSide = "front";
  private highlighted = new Set<string>();
  private regionPhrases = new Map<string, string>();

  constructor(private readonly onRegionClick: RegionClickHandler) {
    this.element = document.createElement("div");
    this.element.className = "avatar";
    this.toggle = document.createElement("button");
    this.toggle.className = "avatar-toggle";
    this.toggle.type = "button";
    this.toggle.addEventListener("click", () => this.showSide(this.side === "front" ? "back" : "front"));
    this.caption = document.createElement("div");
    this.caption.className = "avatar-caption";
    this.views = { front: this.createSvg(), back: this.createSvg() };
    this.shapes = { front: new Map(), back: new Map() };
    this.element.append(this.toggle, this.views.front, this.views.back, this.caption);
    this.showSide("front");
    this.updateCaption();
  }

  private createSvg(): SVGSVGElement {
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", VIEWBOX);
    svg.classList.add("avatar-view");
    const outline = document.createElementNS(SVG_NS, "path");
    outline.setAttribute("d", BODY_OUTLINE);
    outline.classList.add("avatar-outline");
    svg.appendChild(outline);
    return svg;
  }

  /** Build the clickable shapes for the regions the gateway exposes. */
  setRegions(regions: Region[]): void {
    for (const side of ["front", "back"] as const) {
      const entries: Array<{ region: Region; shape: RegionShape; order: number }> = [];
      for (const region of regions) {
        const geometry = REGION_GEOMETRY[region.region_id];
        if (!geometry) {
          console.warn(`avatar: no geometry for region '${region.region_id}', skipping`);
          continue;
        }
        const visible = region.side === "both" || region.side === side;
        const shape = geometry[side];
        if (!visible || !shape) {
          continue;
        }
        entries.push({ region, shape, order: geometry.order ?? 50 });
      }
      entries.sort((a, b) => a.order - b.order);
      for (const { region, shape } of entries) {
        const node = this.createShape(region, shape, side);
        this.views[side].appendChild(node);
        this.shapes[side].set(region.region_id, node);
      }
    }
    for (const region of regions) {
      this.regionPhrases.set(region.region_id, region.phrase);
    }
  }

  private createShape(region: Region, shape: RegionShape, side: ViewSide): SVGElement {
    const node = document.createElementNS(SVG_NS, shape.kind);
    if (shape.kind === "circle") {
      node.setAttribute("cx", String(shape.cx));
      node.setAttribute("cy", String(shape.cy));
      node.setAttribute("r", String(shape.r));
    } else {
      node.setAttribute("cx", String(shape.cx));
      node.setAttribute("cy", String(shape.cy));
      node.setAttribute("rx", String(shape.rx));
      node.setAttribute("ry", String(shape.ry));
    }
    node.classList.add("avatar-region");
    node.dataset.regionId = region.region_id;
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = region.phrase;
    node.appendChild(title);
    node.addEventListener("click", () => this.onRegionClick(region.region_id, side));
    return node;
  }

  get currentSide(): ViewSide {
    return this.side;
  }

  get highlightedRegions(): ReadonlySet<string> {
    return this.highlighted;
  }

  showSide(side: ViewSide): void {
    this.side = side;
    this.views.front.style.display = side === "front" ? "" : "none";
    this.views.back.style.display = side === "back" ? "" : "none";
    this.toggle.textContent = side === "front" ? "show back" : "show front";
  }

  /** Apply a response's highlights; flips to the hinted side first. */
  setHighlights(regionIds: string[], sideHint: SideName): void {
    const known = regionIds.filter((id) => {
      if (this.shapes.front.has(id) || this.shapes.back.has(id)) {
        return true;
      }
      console.warn(`avatar: dropping unknown highlight region '${id}'`);
      return false;
    });
    this.highlighted = new Set(known);
    if (sideHint === "back") {
      this.showSide("back");
    } else {
      // "both" keeps the default front view; the toggle reveals the rest
      this.showSide("front");
    }
    for (const side of ["front", "back"] as const) {
      for (const [regionId, node] of this.shapes[side]) {
        node.classList.toggle("highlighted", this.highlighted.has(regionId));
      }
    }
    this.updateCaption();
  }

  clearHighlights(): void {
    this.setHighlights([], "front");
  }

  private updateCaption(): void {
    if (this.highlighted.size === 0) {
      this.caption.textContent = "";
      return;
    }
    const phrases = [...this.highlighted]
      .map((id) => this.regionPhrases.get(id) ?? id)
      .sort()
      .join(", ");
    this.caption.textContent = `highlighted: ${phrases}`;
  }
}
