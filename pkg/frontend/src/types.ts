/** Payload shapes of the rpys HTTP API. The UI never computes any of
 * these numbers itself; everything rendered is traceable to a field
 * delivered by the server. */

export interface DatasetStats {
  total_nondistinct_crs: number;
  min_rpy: number;
  max_rpy: number;
  n_citing_pubs: number;
  min_citing_year: number;
  max_citing_year: number;
  n_distinct_crs: number;
  n_distinct_rpys: number;
  n_distinct_citing_years: number;
}

export interface SpectrogramRow {
  rpy: number;
  ncr: number;
  median_dev: number;
  is_peak: boolean;
}

export interface BundleReference {
  cr_id: number;
  raw: string;
  n_cr: number;
  perc_yr: number | null;
  n_top10: number;
  n_pyears: number;
}

export interface YearReferences {
  rpy: number;
  references: BundleReference[];
}

export interface Bundle {
  stats: DatasetStats;
  spectrogram: SpectrogramRow[];
  peak_years: number[];
  references_by_rpy: YearReferences[];
  op_log_length: number;
}

export interface StatsResponse {
  session_id?: string;
  created_at?: string;
  stats: DatasetStats | null;
  undo_depth: number;
  op_log_length: number;
}

export interface SpectrogramResponse {
  spectrogram: SpectrogramRow[];
  peak_years: number[];
  total_ncr: number;
  op_log_length: number;
}

export interface TableReference {
  cr_id: number;
  raw: string;
  rpy: number | null;
  n_cr: number;
  perc_yr: number | null;
  n_pyears: number;
  n_top10: number;
  n_top1: number;
  n_top0_1: number;
}

export interface ReferencesResponse {
  references: TableReference[];
  op_log_length: number;
}

export type SortKey = 'n_cr' | 'n_top10';

export type MutationOp =
  | { op: 'removeCR'; lo: number; hi: number }
  | { op: 'cluster'; threshold: number; volume: boolean; page: boolean; DOI: boolean }
  | { op: 'merge' };
