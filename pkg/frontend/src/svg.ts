/** Deterministic SVG line charts: fixed layout, fixed palette, fixed number
 *  formatting, so identical input always yields identical bytes. */

export interface Series {
  label: string;
  points: { x: number; y: number; se?: number }[];
}

export interface ChartInput {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const W = 640;
const H = 420;
const M = { left: 62, right: 18, top: 34, bottom: 48 };
const PALETTE = ["#1f6fb4", "#d0502a", "#3c8a41", "#8356a8", "#b4822c", "#4ea6a6"];

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`cannot format ${v}`);
  if (v === 0) return "0";
  const s = v.toPrecision(6);
  return String(Number(s));
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const r = raw / mag;
  const m = r <= 1 ? 1 : r <= 2 ? 2 : r <= 5 ? 5 : 10;
  return m * mag;
}

function ticks(lo: number, hi: number, target = 6): number[] {
  if (hi <= lo) {
    hi = lo + 1;
  }
  const step = niceStep((hi - lo) / target);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9 * step; v += step) {
    out.push(Math.abs(v) < 1e-12 * step ? 0 : v);
  }
  return out;
}

export function renderChart(input: ChartInput): string {
  const pts = input.series.flatMap((s) => s.points);
  if (pts.length === 0) throw new Error("nothing to plot: no data points");
  let xLo = Math.min(...pts.map((p) => p.x));
  let xHi = Math.max(...pts.map((p) => p.x));
  let yLo = Math.min(...pts.map((p) => p.y - (p.se ?? 0)));
  let yHi = Math.max(...pts.map((p) => p.y + (p.se ?? 0)));
  const xPad = (xHi - xLo || 1) * 0.04;
  const yPad = (yHi - yLo || 1) * 0.08;
  xLo -= xPad; xHi += xPad; yLo -= yPad; yHi += yPad;

  const plotW = W - M.left - M.right;
  const plotH = H - M.top - M.bottom;
  const sx = (x: number) => M.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const sy = (y: number) => M.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;
  const px = (v: number) => fmt(Math.round(v * 100) / 100);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${W}" height="${H}" fill="#ffffff"/>`);
  parts.push(`<text x="${W / 2}" y="20" font-size="14" text-anchor="middle">${esc(input.title)}</text>`);

  for (const t of ticks(xLo + xPad, xHi - xPad)) {
    const x = px(sx(t));
    parts.push(`<line x1="${x}" y1="${M.top}" x2="${x}" y2="${M.top + plotH}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${x}" y="${M.top + plotH + 16}" font-size="11" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of ticks(yLo + yPad, yHi - yPad)) {
    const y = px(sy(t));
    parts.push(`<line x1="${M.left}" y1="${y}" x2="${M.left + plotW}" y2="${y}" stroke="#dddddd" stroke-width="1"/>`);
    parts.push(`<text x="${M.left - 6}" y="${y}" font-size="11" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`);
  }
  parts.push(`<rect x="${M.left}" y="${M.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444444"/>`);
  parts.push(`<text x="${M.left + plotW / 2}" y="${H - 10}" font-size="12" text-anchor="middle">${esc(input.xLabel)}</text>`);
  parts.push(`<text x="16" y="${M.top + plotH / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 ${M.top + plotH / 2})">${esc(input.yLabel)}</text>`);

  input.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ordered = [...s.points].sort((a, b) => a.x - b.x);
    for (const p of ordered) {
      if (p.se !== undefined && p.se > 0) {
        const x = px(sx(p.x));
        const y1 = px(sy(p.y - p.se));
        const y2 = px(sy(p.y + p.se));
        parts.push(`<line x1="${x}" y1="${y1}" x2="${x}" y2="${y2}" stroke="${color}" stroke-width="1"/>`);
      }
    }
    const path = ordered.map((p) => `${px(sx(p.x))},${px(sy(p.y))}`).join(" ");
    parts.push(`<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.8"/>`);
    for (const p of ordered) {
      parts.push(`<circle cx="${px(sx(p.x))}" cy="${px(sy(p.y))}" r="2.6" fill="${color}"/>`);
    }
  });

  const legendX = M.left + plotW - 8;
  input.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = M.top + 12 + 16 * i;
    parts.push(`<line x1="${legendX - 150}" y1="${y}" x2="${legendX - 126}" y2="${y}" stroke="${color}" stroke-width="1.8"/>`);
    parts.push(`<text x="${legendX - 120}" y="${y + 4}" font-size="11">${esc(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
