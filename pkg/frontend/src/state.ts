import { ApiClient } from './api.js';
import { Bundle, SortKey, StatsResponse } from './types.js';

export interface ViewState {
  visibleRange: [number, number] | null;
  hoverYear: number | null;
  sort: SortKey;
  pendingThreshold: number;
  token: number;
}

export type Listener = () => void;

/** Client-side session state.
 *
 * View operations (zoom, hover, sort) never touch the server; only the
 * threshold control and undo mutate the session, and at most one
 * mutation is in flight at a time (later ones queue locally).  Every
 * response carries the session's op-log length; a reader that observes
 * a token different from the last known one refetches, so a stale
 * bundle can never stick.
 */
export class ExplorerStore {
  readonly view: ViewState = {
    visibleRange: null,
    hoverYear: null,
    sort: 'n_cr',
    pendingThreshold: 1,
    token: 0,
  };

  bundle: Bundle | null = null;
  stats: StatsResponse | null = null;
  lastError: string | null = null;

  private queue: Promise<void> = Promise.resolve();
  private inFlight = 0;
  private listeners: Listener[] = [];

  constructor(private api: ApiClient, private sessionId: string) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  get mutationInFlight(): boolean {
    return this.inFlight > 0;
  }

  async refresh(): Promise<void> {
    const bundle = await this.api.bundle(this.sessionId);
    const stats = await this.api.stats(this.sessionId);
    this.bundle = bundle;
    this.stats = stats;
    this.view.token = stats.op_log_length;
    if (bundle.op_log_length !== stats.op_log_length) {
      // raced a mutation between the two reads: fetch a coherent pair
      return this.refresh();
    }
    this.notify();
  }

  /** Zoom, hover and sort are pure view changes. */
  zoomTo(range: [number, number] | null): void {
    this.view.visibleRange = range;
    this.notify();
  }

  hover(year: number | null): void {
    this.view.hoverYear = year;
    this.notify();
  }

  setSort(sort: SortKey): void {
    this.view.sort = sort;
    this.notify();
  }

  /** Serialize mutations: each waits for the previous one to finish. */
  private enqueue(action: () => Promise<void>): Promise<void> {
    const run = this.queue.then(async () => {
      this.inFlight += 1;
      try {
        await action();
        this.lastError = null;
      } catch (error) {
        this.lastError = error instanceof Error ? error.message : String(error);
        throw error;
      } finally {
        this.inFlight -= 1;
        this.notify();
      }
    });
    this.queue = run.catch(() => undefined);
    return run;
  }

  /** Drop references cited fewer than `threshold` times
   * (removeCR [0, threshold - 1]) and refresh the view. */
  applyThreshold(threshold: number): Promise<void> {
    if (threshold < 1) {
      return Promise.reject(new Error('threshold must be >= 1'));
    }
    this.view.pendingThreshold = threshold;
    return this.enqueue(async () => {
      const response = await this.api.applyOp(this.sessionId, {
        op: 'removeCR',
        lo: 0,
        hi: threshold - 1,
      });
      this.view.token = response.op_log_length;
      await this.refresh();
    });
  }

  undo(): Promise<void> {
    return this.enqueue(async () => {
      const response = await this.api.undo(this.sessionId);
      this.view.token = response.op_log_length;
      await this.refresh();
    });
  }

  /** Readers call this with the token of any response they used; a
   * mismatch means the view is stale and triggers a refetch. */
  observeToken(token: number): void {
    if (token !== this.view.token && this.inFlight === 0) {
      void this.refresh();
    }
  }
}
