import { ChartModel } from './chartModel.js';

const esc = (text: string): string =>
  text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');

const fmt = (value: number): string => value.toFixed(2);

/** Serialize the chart model to an SVG document.  Pure string building:
 * the same markup renders in the browser and asserts in tests. */
export const renderSvg = (model: ChartModel): string => {
  if (model.empty) {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${model.width}" ` +
      `height="${model.height}" class="spectrogram spectrogram-empty">` +
      `<text x="${model.width / 2}" y="${model.height / 2}" text-anchor="middle" ` +
      `class="empty-state">no data loaded</text></svg>`
    );
  }
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${model.width}" ` +
      `height="${model.height}" class="spectrogram" ` +
      `data-x-domain="${model.xScale.domain[0]},${model.xScale.domain[1]}">`
  );
  for (const bar of model.bars) {
    parts.push(
      `<rect class="bar${bar.isPeak ? ' bar-peak' : ''}" data-rpy="${bar.rpy}" ` +
        `data-ncr="${bar.ncr}" x="${fmt(bar.x)}" y="${fmt(bar.y)}" ` +
        `width="${fmt(bar.width)}" height="${fmt(bar.height)}"><title>` +
        `${bar.rpy}: ${bar.ncr}</title></rect>`
    );
  }
  const points = model.line.map((p) => `${fmt(p.x)},${fmt(p.y)}`).join(' ');
  parts.push(`<polyline class="dev-line" fill="none" points="${points}"/>`);
  for (const star of model.stars) {
    parts.push(
      `<text class="peak-star" data-rpy="${star.rpy}" x="${fmt(star.x)}" ` +
        `y="${fmt(star.y)}" text-anchor="middle">★</text>`
    );
    parts.push(
      `<text class="peak-label" data-rpy="${star.rpy}" x="${fmt(star.x + 6)}" ` +
        `y="${fmt(star.y - 10)}">${esc(star.label)}</text>`
    );
  }
  parts.push('</svg>');
  return parts.join('');
};
