/** Minimal SVG assembly: fixed-size canvas, linear/log scales, axes. */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 80, right: 30, top: 40, bottom: 60 };

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

function makeScale(domain: [number, number], range: [number, number], log: boolean): Scale {
  const [d0, d1] = log ? [Math.log10(domain[0]), Math.log10(domain[1])] : domain;
  const span = d1 - d0 || 1;
  const fn = ((value: number) => {
    const v = log ? Math.log10(value) : value;
    return range[0] + ((v - d0) / span) * (range[1] - range[0]);
  }) as Scale;
  fn.domain = domain;
  return fn;
}

export function xScale(domain: [number, number], log = false): Scale {
  return makeScale(domain, [MARGIN.left, WIDTH - MARGIN.right], log);
}

export function yScale(domain: [number, number], log = false): Scale {
  return makeScale(domain, [HEIGHT - MARGIN.bottom, MARGIN.top], log);
}

export function pad(domain: [number, number], log = false): [number, number] {
  let [a, b] = domain;
  if (log) {
    return [a / 1.5, b * 1.5];
  }
  const gap = (b - a || Math.abs(a) || 1) * 0.08;
  return [a - gap, b + gap];
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

export class Svg {
  private parts: string[] = [];

  polyline(points: [number, number][], stroke: string, width = 1.8): void {
    const attr = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" stroke-width="${width}" points="${attr}"/>`,
    );
  }

  circle(x: number, y: number, fill: string, r = 4): void {
    this.parts.push(
      `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#888", dash = ""): void {
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" ` +
        `y2="${y2.toFixed(2)}" stroke="${stroke}"${dashAttr}/>`,
    );
  }

  text(x: number, y: number, content: string, opts: { size?: number; anchor?: string;
       fill?: string } = {}): void {
    const size = opts.size ?? 13;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222";
    this.parts.push(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" font-size="${size}" ` +
        `text-anchor="${anchor}" fill="${fill}" font-family="sans-serif">` +
        `${escapeXml(content)}</text>`,
    );
  }

  axes(xlabel: string, ylabel: string, title: string): void {
    const x0 = MARGIN.left;
    const y0 = HEIGHT - MARGIN.bottom;
    this.line(x0, MARGIN.top, x0, y0, "#222");
    this.line(x0, y0, WIDTH - MARGIN.right, y0, "#222");
    this.text(WIDTH / 2, HEIGHT - 15, xlabel, { anchor: "middle" });
    this.parts.push(
      `<text x="20" y="${HEIGHT / 2}" font-size="13" text-anchor="middle" ` +
        `fill="#222" font-family="sans-serif" transform="rotate(-90 20 ${HEIGHT / 2})">` +
        `${escapeXml(ylabel)}</text>`,
    );
    this.text(WIDTH / 2, 22, title, { anchor: "middle", size: 15 });
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
