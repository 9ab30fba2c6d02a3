/**
 * Deterministic SVG assembly: figures are plain strings built in a fixed
 * order with fixed-precision coordinates, so identical inputs produce
 * byte-identical files.
 */

export function fmt(x: number): string {
  // fixed precision, normalized negative zero
  const v = Math.abs(x) < 5e-7 ? 0 : x;
  return v.toFixed(2).replace(/\.?0+$/, "") || "0";
}

export class Svg {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    );
    this.parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, extra = ""): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${extra}/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  text(
    x: number,
    y: number,
    content: string,
    size = 12,
    anchor: "start" | "middle" | "end" = "start",
    rotate = 0,
  ): void {
    const transform = rotate ? ` transform="rotate(${rotate} ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}"${transform}>` +
        `${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Categorical palette for the three business models. */
export const MODEL_COLORS: Record<string, string> = {
  N: "#4878a8", // no remanufacturing: blue
  O: "#6aa84f", // in-house: green
  T: "#e69138", // licensed third party: orange
};

/** Diverging scale for signed fractions: blue (negative) to red (positive). */
export function divergingColor(v: number, lo: number, hi: number): string {
  const span = Math.max(Math.abs(lo), Math.abs(hi), 1e-12);
  const t = Math.max(-1, Math.min(1, v / span));
  if (t < 0) {
    return blend([33, 102, 172], [247, 247, 247], 1 + t);
  }
  return blend([247, 247, 247], [178, 24, 43], t);
}

/** Sequential scale: light to dark. */
export function sequentialColor(v: number, lo: number, hi: number): string {
  const t = hi > lo ? Math.max(0, Math.min(1, (v - lo) / (hi - lo))) : 0;
  return blend([254, 235, 226], [122, 1, 119], t);
}

function blend(a: number[], b: number[], t: number): string {
  const c = a.map((av, i) => Math.round(av + (b[i] - av) * t));
  return `#${c.map((v) => v.toString(16).padStart(2, "0")).join("")}`;
}
