/** Schematic avatar geometry: one addressable shape per region per visible side.
 *
 * Coordinates live on a 200 x 420 viewBox. Larger areas carry a lower paint
 * order so small organs stay clickable on top of them. The geometry is
 * deliberately diagrammatic; the region-id contract with the gateway is what
 * matters, not anatomy.
 */

export interface CircleShape {
  kind: "circle";
  cx: number;
  cy: number;
  r: number;
}

export interface EllipseShape {
  kind: "ellipse";
  cx: number;
  cy: number;
  rx: number;
  ry: number;
}

export type RegionShape = CircleShape | EllipseShape;

export interface RegionGeometry {
  front?: RegionShape;
  back?: RegionShape;
  /** paint order: lower draws first (background) */
  order?: number;
}

const c = (cx: number, cy: number, r: number): CircleShape => ({ kind: "circle", cx, cy, r });
const e = (cx: number, cy: number, rx: number, ry: number): EllipseShape => ({
  kind: "ellipse",
  cx,
  cy,
  rx,
  ry,
});

export const VIEWBOX = "0 0 200 420";

export const REGION_GEOMETRY: Record<string, RegionGeometry> = {
  // head and face (front); scalp/brain (back)
  hair: { front: c(100, 16, 13), order: 10 },
  scalp: { back: c(100, 16, 13), order: 10 },
  brain: { back: e(100, 34, 13, 9) },
  forehead: { front: e(100, 30, 14, 5) },
  eyebrows: { front: e(100, 38, 15, 2.5) },
  eyelids: { front: e(100, 42, 14, 2) },
  eyelashes: { front: e(100, 45, 14, 1.5) },
  eyes: { front: e(100, 48, 13, 3.5) },
  ear: { front: c(76, 48, 4.5), back: c(76, 48, 4.5) },
  ear_lobe: { front: c(76, 55, 2.5), back: c(76, 55, 2.5) },
  nose: { front: c(100, 55, 4) },
  nostril: { front: e(100, 60, 5, 1.8) },
  cheeks: { front: e(100, 56, 19, 3), order: 20 },
  teeth: { front: e(100, 64, 7, 1.8) },
  lips: { front: e(100, 67, 8, 2) },
  tongue: { front: e(100, 70, 5, 1.8) },
  mouth: { front: e(100, 67.5, 11, 4.5), order: 30 },
  jaw: { front: e(100, 74, 14, 3.5), order: 20 },
  chin: { front: e(100, 79, 7, 2.5) },
  throat: { front: e(100, 88, 7, 4) },
  neck: { front: e(100, 94, 10, 5), back: e(100, 92, 10, 6), order: 20 },

  // torso
  collar_bone: { front: e(100, 104, 25, 3) },
  shoulder: { front: c(58, 108, 7), back: c(58, 108, 7) },
  shoulder_blade: { front: c(142, 110, 5), back: e(122, 120, 9, 7) },
  back: { back: e(100, 146, 26, 28), order: 5 },
  spine: { front: e(100, 150, 2.5, 42), back: e(100, 150, 2.5, 42), order: 15 },
  spinal_cord: { front: e(100, 150, 1.2, 42), back: e(100, 150, 1.2, 42), order: 16 },
  lungs: { front: e(86, 122, 9, 11), back: e(86, 122, 9, 11), order: 25 },
  heart: { front: c(108, 126, 8), back: c(108, 126, 7) },
  breast: { front: c(82, 132, 8), order: 30 },
  nipple: { front: c(118, 132, 3) },
  ribs: { front: e(100, 142, 24, 8), back: e(100, 142, 24, 8), order: 12 },
  liver: { front: e(88, 158, 11, 6), back: e(88, 158, 10, 5) },
  stomach: { front: e(113, 160, 10, 6), back: e(113, 160, 9, 5) },
  pancreas: { front: e(103, 168, 8, 3), back: e(103, 168, 8, 3) },
  kidney: { back: e(116, 174, 6, 8) },
  waist: { front: e(100, 173, 24, 2.5), order: 14 },
  intestines: { front: e(100, 186, 18, 11), back: e(100, 188, 16, 9), order: 22 },
  hip: { front: c(70, 202, 6) },
  pelvis: { front: e(100, 208, 18, 8), back: e(100, 208, 18, 8), order: 12 },
  groin: { front: e(100, 221, 8, 5) },
  buttocks: { back: e(100, 224, 18, 10), order: 12 },
  rectum: { front: c(100, 230, 4), back: c(100, 231, 4) },
  anus: { back: c(100, 238, 2.5) },

  // arms (left side of the drawing)
  arm: { front: e(48, 126, 7, 18), back: e(48, 126, 7, 18), order: 20 },
  elbow: { front: c(44, 148, 5), back: c(44, 148, 5) },
  wrist: { front: c(38, 176, 4), back: c(38, 176, 4) },
  hand: { front: e(34, 188, 6, 8), order: 25 },
  palm: { back: e(34, 188, 6, 8), order: 25 },
  thumb: { front: c(42, 194, 2.5), back: c(42, 194, 2.5) },
  finger: { front: e(31, 199, 4, 6), back: e(31, 199, 4, 6) },

  // legs (left side of the drawing)
  thigh: { front: e(82, 252, 11, 22), back: e(82, 252, 11, 22), order: 20 },
  knee: { front: c(84, 290, 6), back: c(84, 290, 6) },
  shin: { front: e(86, 322, 7, 20) },
  calf: { back: e(86, 322, 8, 18) },
  ankle: { front: c(88, 354, 4), back: c(88, 354, 4) },
  foot: { front: e(86, 366, 10, 5), back: e(86, 366, 10, 5), order: 25 },
  toes: { front: e(81, 373, 7, 3) },
};

/** Human outline drawn behind the region shapes. */
export const BODY_OUTLINE =
  "M100 3 a26 27 0 0 1 0 54 a26 27 0 0 1 0 -54 Z " +
  "M84 84 l32 0 l4 18 l22 8 l14 72 l10 18 l-6 22 l-10 -4 l4 -16 l-12 -20 l-8 -38 " +
  "l0 62 l12 34 l-8 86 l4 58 l12 10 l-24 0 l-2 -60 l-6 -70 l-10 0 l-6 70 l-2 60 " +
  "l-24 0 l12 -10 l4 -58 l-8 -86 l12 -34 l0 -62 l-8 38 l-12 20 l4 16 l-10 4 l-6 -22 " +
  "l10 -18 l14 -72 l22 -8 Z";
