/** Minimal deterministic SVG plotting: axes, polylines, error bars, legend. */

export interface Point {
  x: number;
  y: number;
  err: number;
}

export interface Curve {
  label: string;
  points: Point[];
}

const WIDTH = 760;
const HEIGHT = 520;
const MARGIN = { left: 70, right: 180, top: 48, bottom: 56 };

const PALETTE = [
  "#1f5fa8",
  "#c23b22",
  "#2e8540",
  "#8a4fb0",
  "#b8860b",
  "#117a8b",
  "#d4589c",
  "#555555",
];

const MARKERS = ["circle", "square", "diamond", "triangle"] as const;

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  if (v === 0) return "0";
  const s = v.toPrecision(6);
  return String(Number(s));
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (m * mag >= step0) {
      step = m * mag;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = start; t <= hi + 1e-9 * span; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

function marker(kind: (typeof MARKERS)[number], cx: number, cy: number, color: string): string {
  const r = 3.5;
  const c = `${fmt(cx)}`, d = `${fmt(cy)}`;
  switch (kind) {
    case "circle":
      return `<circle cx="${c}" cy="${d}" r="${r}" fill="${color}"/>`;
    case "square":
      return `<rect x="${fmt(cx - r)}" y="${fmt(cy - r)}" width="${2 * r}" height="${2 * r}" fill="${color}"/>`;
    case "diamond":
      return `<path d="M ${fmt(cx)} ${fmt(cy - r - 1)} L ${fmt(cx + r + 1)} ${fmt(cy)} L ${fmt(cx)} ${fmt(cy + r + 1)} L ${fmt(cx - r - 1)} ${fmt(cy)} Z" fill="${color}"/>`;
    case "triangle":
      return `<path d="M ${fmt(cx)} ${fmt(cy - r - 1)} L ${fmt(cx + r + 1)} ${fmt(cy + r)} L ${fmt(cx - r - 1)} ${fmt(cy + r)} Z" fill="${color}"/>`;
  }
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Render curves to a standalone SVG document (byte-stable for fixed input). */
export function plot(curves: Curve[], title: string, xLabel: string, yLabel: string): string {
  const pts = curves.flatMap((c) => c.points);
  if (pts.length === 0) {
    throw new Error("no rows");
  }
  let xLo = Math.min(...pts.map((p) => p.x));
  let xHi = Math.max(...pts.map((p) => p.x));
  let yLo = Math.min(...pts.map((p) => p.y - p.err));
  let yHi = Math.max(...pts.map((p) => p.y + p.err));
  if (xHi === xLo) {
    xLo -= 1;
    xHi += 1;
  }
  if (yHi === yLo) {
    yLo -= 1;
    yHi += 1;
  }
  const padY = 0.06 * (yHi - yLo);
  yLo -= padY;
  yHi += padY;

  const iw = WIDTH - MARGIN.left - MARGIN.right;
  const ih = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * iw;
  const sy = (y: number) => MARGIN.top + ih - ((y - yLo) / (yHi - yLo)) * ih;

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  out.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  out.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16">${esc(title)}</text>`);

  // axes box
  out.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${iw}" height="${ih}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of niceTicks(xLo, xHi)) {
    const x = sx(t);
    out.push(`<line x1="${fmt(x)}" y1="${MARGIN.top + ih}" x2="${fmt(x)}" y2="${MARGIN.top + ih + 5}" stroke="#333"/>`);
    out.push(`<text x="${fmt(x)}" y="${MARGIN.top + ih + 20}" text-anchor="middle" font-size="11">${fmt(t)}</text>`);
    out.push(`<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + ih}" stroke="#ddd" stroke-width="0.5"/>`);
  }
  for (const t of niceTicks(yLo, yHi)) {
    const y = sy(t);
    out.push(`<line x1="${MARGIN.left - 5}" y1="${fmt(y)}" x2="${MARGIN.left}" y2="${fmt(y)}" stroke="#333"/>`);
    out.push(`<text x="${MARGIN.left - 9}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${fmt(t)}</text>`);
    out.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + iw}" y2="${fmt(y)}" stroke="#ddd" stroke-width="0.5"/>`);
  }
  out.push(
    `<text x="${MARGIN.left + iw / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="13">${esc(xLabel)}</text>`,
  );
  out.push(
    `<text x="20" y="${MARGIN.top + ih / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 20 ${MARGIN.top + ih / 2})">${esc(yLabel)}</text>`,
  );

  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const mk = MARKERS[ci % MARKERS.length];
    const path = curve.points
      .map((p, i) => `${i === 0 ? "M" : "L"} ${fmt(sx(p.x))} ${fmt(sy(p.y))}`)
      .join(" ");
    if (curve.points.length > 1) {
      out.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    }
    for (const p of curve.points) {
      if (p.err > 0) {
        const x = sx(p.x);
        const y1 = sy(p.y - p.err);
        const y2 = sy(p.y + p.err);
        out.push(`<line x1="${fmt(x)}" y1="${fmt(y1)}" x2="${fmt(x)}" y2="${fmt(y2)}" stroke="${color}" stroke-width="1"/>`);
        out.push(`<line x1="${fmt(x - 3)}" y1="${fmt(y1)}" x2="${fmt(x + 3)}" y2="${fmt(y1)}" stroke="${color}" stroke-width="1"/>`);
        out.push(`<line x1="${fmt(x - 3)}" y1="${fmt(y2)}" x2="${fmt(x + 3)}" y2="${fmt(y2)}" stroke="${color}" stroke-width="1"/>`);
      }
      out.push(marker(mk, sx(p.x), sy(p.y), color));
    }
  });

  // legend, one entry per curve, in curve order (already sorted by label)
  const lx = MARGIN.left + iw + 14;
  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const mk = MARKERS[ci % MARKERS.length];
    const y = MARGIN.top + 10 + ci * 22;
    out.push(`<line x1="${lx}" y1="${y}" x2="${lx + 26}" y2="${y}" stroke="${color}" stroke-width="1.8"/>`);
    out.push(marker(mk, lx + 13, y, color));
    out.push(`<text x="${lx + 32}" y="${y + 4}" font-size="12">${esc(curve.label)}</text>`);
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}
