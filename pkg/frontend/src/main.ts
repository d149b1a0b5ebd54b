import { ApiClient, httpTransport } from './api.js';
import { buildChartModel, nearestPoint } from './chartModel.js';
import { ExplorerStore } from './state.js';
import { renderSvg } from './svg.js';
import { buildTooltip, renderTooltipHtml } from './tooltip.js';

const baseUrl = '';
const api = new ApiClient(httpTransport(baseUrl));

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
};

const createSession = async (files: FileList): Promise<string> => {
  const form = new FormData();
  for (const file of Array.from(files)) {
    form.append('files', file, file.name);
  }
  const response = await fetch(`${baseUrl}/sessions`, { method: 'POST', body: form });
  if (!response.ok) {
    throw new Error(`upload failed: ${(await response.json()).detail ?? response.status}`);
  }
  return (await response.json()).session_id as string;
};

const renderTable = (store: ExplorerStore): string => {
  if (!store.bundle) {
    return '';
  }
  const header =
    '<tr><th>cited reference</th><th>RPY</th><th data-sort="n_cr">N_CR</th>' +
    '<th>PERC_YR</th><th data-sort="n_top10">N_TOP10</th><th>N_PYEARS</th></tr>';
  const rows = store.bundle.references_by_rpy
    .flatMap((year) => year.references.map((r) => ({ ...r, rpy: year.rpy })))
    .sort((a, b) =>
      store.view.sort === 'n_cr' ? b.n_cr - a.n_cr : b.n_top10 - a.n_top10
    )
    .slice(0, 50)
    .map(
      (r) =>
        `<tr><td>${r.raw.replace(/&/g, '&amp;').replace(/</g, '&lt;')}</td>` +
        `<td>${r.rpy}</td><td>${r.n_cr}</td>` +
        `<td>${r.perc_yr === null ? '' : r.perc_yr.toFixed(4)}</td>` +
        `<td>${r.n_top10}</td><td>${r.n_pyears}</td></tr>`
    )
    .join('');
  return `<table>${header}${rows}</table>`;
};

const boot = (): void => {
  const chart = el<HTMLDivElement>('chart');
  const tooltip = el<HTMLDivElement>('tooltip');
  const table = el<HTMLDivElement>('reference-table');
  const statsBox = el<HTMLDivElement>('stats');
  const slider = el<HTMLInputElement>('threshold');
  const sliderLabel = el<HTMLSpanElement>('threshold-value');
  const undoButton = el<HTMLButtonElement>('undo');
  const resetZoom = el<HTMLButtonElement>('reset-zoom');
  const fileInput = el<HTMLInputElement>('upload');

  let store: ExplorerStore | null = null;
  let dragStart: number | null = null;

  const redraw = (): void => {
    if (!store) {
      return;
    }
    const model = buildChartModel(
      store.bundle,
      chart.clientWidth || 900,
      360,
      store.view.visibleRange
    );
    chart.innerHTML = renderSvg(model);
    table.innerHTML = renderTable(store);
    const stats = store.stats?.stats;
    statsBox.textContent = stats
      ? `${stats.n_distinct_crs} distinct references, RPY ${stats.min_rpy}-` +
        `${stats.max_rpy}, undo depth ${store.stats?.undo_depth ?? 0}` +
        (store.mutationInFlight ? ' (working...)' : '')
      : 'empty dataset';
    sliderLabel.textContent = slider.value;

    const svg = chart.querySelector('svg');
    if (!svg || model.empty) {
      tooltip.innerHTML = '';
      return;
    }
    svg.addEventListener('mousemove', (event) => {
      const rect = svg.getBoundingClientRect();
      const point = nearestPoint(model, event.clientX - rect.left);
      if (point && store) {
        store.view.hoverYear = point.rpy;
        tooltip.innerHTML = renderTooltipHtml(buildTooltip(store.bundle!, point.rpy));
      }
    });
    svg.addEventListener('mousedown', (event) => {
      const rect = svg.getBoundingClientRect();
      dragStart = nearestPoint(model, event.clientX - rect.left)?.rpy ?? null;
    });
    svg.addEventListener('mouseup', (event) => {
      const rect = svg.getBoundingClientRect();
      const end = nearestPoint(model, event.clientX - rect.left)?.rpy ?? null;
      if (store && dragStart !== null && end !== null && dragStart !== end) {
        store.zoomTo([Math.min(dragStart, end), Math.max(dragStart, end)]);
      }
      dragStart = null;
    });
  };

  fileInput.addEventListener('change', async () => {
    if (!fileInput.files || fileInput.files.length === 0) {
      return;
    }
    const sessionId = await createSession(fileInput.files);
    store = new ExplorerStore(api, sessionId);
    store.subscribe(redraw);
    await store.refresh();
  });

  slider.addEventListener('change', () => {
    void store?.applyThreshold(Number(slider.value));
  });
  undoButton.addEventListener('click', () => {
    void store?.undo();
  });
  resetZoom.addEventListener('click', () => {
    store?.zoomTo(null);
  });
  table.addEventListener('click', (event) => {
    const sortKey = (event.target as HTMLElement).dataset?.sort;
    if (store && (sortKey === 'n_cr' || sortKey === 'n_top10')) {
      store.setSort(sortKey);
    }
  });
};

document.addEventListener('DOMContentLoaded', boot);
