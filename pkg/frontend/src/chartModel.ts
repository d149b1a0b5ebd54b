import { Bundle, SpectrogramRow } from './types.js';

/** Geometry of the bar-line spectrogram, computed as plain data so the
 * renderer and the tests share one source of truth.  Bars show the
 * citation count per reference publication year, the overlaid line
 * shows the five-year median deviation, and flagged peak years get a
 * star marker with the year written next to it. */

export interface Bar {
  rpy: number;
  ncr: number;
  x: number;
  y: number;
  width: number;
  height: number;
  isPeak: boolean;
}

export interface LinePoint {
  rpy: number;
  dev: number;
  x: number;
  y: number;
}

export interface Star {
  rpy: number;
  label: string;
  x: number;
  y: number;
}

export interface Scale {
  domain: [number, number];
  range: [number, number];
}

export interface ChartModel {
  empty: boolean;
  width: number;
  height: number;
  bars: Bar[];
  line: LinePoint[];
  stars: Star[];
  xScale: Scale;
  yScale: Scale;
  devScale: Scale;
}

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const MARGINS: Margins = { top: 24, right: 16, bottom: 28, left: 44 };

const project = (scale: Scale, value: number): number => {
  const [d0, d1] = scale.domain;
  const [r0, r1] = scale.range;
  if (d1 === d0) {
    return (r0 + r1) / 2;
  }
  return r0 + ((value - d0) / (d1 - d0)) * (r1 - r0);
};

export const buildChartModel = (
  bundle: Bundle | null,
  width = 900,
  height = 360,
  visibleRange: [number, number] | null = null
): ChartModel => {
  const emptyModel: ChartModel = {
    empty: true,
    width,
    height,
    bars: [],
    line: [],
    stars: [],
    xScale: { domain: [0, 1], range: [MARGINS.left, width - MARGINS.right] },
    yScale: { domain: [0, 1], range: [height - MARGINS.bottom, MARGINS.top] },
    devScale: { domain: [0, 1], range: [height - MARGINS.bottom, MARGINS.top] },
  };
  if (!bundle || bundle.spectrogram.length === 0) {
    return emptyModel;
  }

  let rows: SpectrogramRow[] = bundle.spectrogram;
  let [lo, hi] = [rows[0].rpy, rows[rows.length - 1].rpy];
  if (visibleRange) {
    lo = Math.max(lo, Math.min(visibleRange[0], visibleRange[1]));
    hi = Math.min(hi, Math.max(visibleRange[0], visibleRange[1]));
    rows = rows.filter((r) => r.rpy >= lo && r.rpy <= hi);
  }
  if (rows.length === 0) {
    return emptyModel;
  }

  const xScale: Scale = {
    domain: [lo, hi + 1],
    range: [MARGINS.left, width - MARGINS.right],
  };
  const maxNcr = Math.max(1, ...rows.map((r) => r.ncr));
  const yScale: Scale = {
    domain: [0, maxNcr],
    range: [height - MARGINS.bottom, MARGINS.top],
  };
  const devValues = rows.map((r) => r.median_dev);
  const devScale: Scale = {
    domain: [Math.min(0, ...devValues), Math.max(1, ...devValues)],
    range: [height - MARGINS.bottom, MARGINS.top],
  };

  const slot = (project(xScale, lo + 1) - project(xScale, lo)) * 0.8;
  const bars: Bar[] = rows.map((r) => {
    const x0 = project(xScale, r.rpy);
    const yTop = project(yScale, r.ncr);
    return {
      rpy: r.rpy,
      ncr: r.ncr,
      x: x0 + slot * 0.125,
      y: yTop,
      width: slot,
      height: project(yScale, 0) - yTop,
      isPeak: r.is_peak,
    };
  });

  const line: LinePoint[] = rows.map((r) => ({
    rpy: r.rpy,
    dev: r.median_dev,
    x: project(xScale, r.rpy) + slot * 0.625,
    y: project(devScale, r.median_dev),
  }));

  const stars: Star[] = rows
    .filter((r) => r.is_peak)
    .map((r) => ({
      rpy: r.rpy,
      label: String(r.rpy),
      x: project(xScale, r.rpy) + slot * 0.625,
      y: project(yScale, r.ncr) - 8,
    }));

  return { empty: false, width, height, bars, line, stars, xScale, yScale, devScale };
};

/** The data point nearest to a pixel position; crosshairs snap to it. */
export const nearestPoint = (model: ChartModel, pixelX: number): LinePoint | null => {
  if (model.empty || model.line.length === 0) {
    return null;
  }
  let best = model.line[0];
  for (const point of model.line) {
    if (Math.abs(point.x - pixelX) < Math.abs(best.x - pixelX)) {
      best = point;
    }
  }
  return best;
};
