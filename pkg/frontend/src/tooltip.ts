import { Bundle, BundleReference } from './types.js';

export interface TooltipModel {
  rpy: number;
  rows: BundleReference[];
  empty: boolean;
}

const MAX_ROWS = 5;

/** Tooltip content for one year: up to five most referenced cited
 * references with their server-delivered indicators; a gap year yields
 * the empty state ("no references"). */
export const buildTooltip = (bundle: Bundle, rpy: number): TooltipModel => {
  const entry = bundle.references_by_rpy.find((e) => e.rpy === rpy);
  const rows = entry ? entry.references.slice(0, MAX_ROWS) : [];
  return { rpy, rows, empty: rows.length === 0 };
};

export const renderTooltipHtml = (model: TooltipModel): string => {
  if (model.empty) {
    return `<div class="tooltip" data-rpy="${model.rpy}"><em>no references</em></div>`;
  }
  const rows = model.rows
    .map(
      (r) =>
        `<tr><td class="raw">${r.raw
          .replace(/&/g, '&amp;')
          .replace(/</g, '&lt;')}</td>` +
        `<td>${r.n_cr}</td>` +
        `<td>${r.perc_yr === null ? '' : r.perc_yr.toFixed(4)}</td>` +
        `<td>${r.n_top10}</td><td>${r.n_pyears}</td></tr>`
    )
    .join('');
  return (
    `<div class="tooltip" data-rpy="${model.rpy}"><table>` +
    `<thead><tr><th>cited reference</th><th>N_CR</th><th>PERC_YR</th>` +
    `<th>N_TOP10</th><th>N_PYEARS</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></div>`
  );
};
