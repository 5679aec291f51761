/**
 * Script-side binding for the canon22 feature extractor.
 *
 * The extractor itself stays in its own process; this module talks to it
 * exclusively through the public command line and its file formats, so
 * the binding inherits the extractor's bit-for-bit determinism instead
 * of re-implementing any numerics. Markers (features the extractor
 * declines to compute) surface as NaN plus a boolean flag; the names
 * array is always the canonical 22 in extractor order.
 *
 * Set CANON22_PYTHON to pick the interpreter that hosts the extractor
 * (default "python3"). Every call is stateless: a fresh temp directory
 * per invocation, removed afterwards.
 */
import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const FEATURE_NAMES: readonly string[] = Object.freeze([
  "DN_HistogramMode_5",
  "DN_HistogramMode_10",
  "SB_BinaryStats_mean_longstretch1",
  "DN_OutlierInclude_p_001_mdrmd",
  "DN_OutlierInclude_n_001_mdrmd",
  "CO_f1ecac",
  "CO_FirstMin_ac",
  "SP_Summaries_welch_rect_area_5_1",
  "SP_Summaries_welch_rect_centroid",
  "FC_LocalSimple_mean3_stderr",
  "CO_trev_1_num",
  "CO_HistogramAMI_even_2_5",
  "IN_AutoMutualInfoStats_40_gaussian_fmmi",
  "MD_hrv_classic_pnn40",
  "SB_BinaryStats_diff_longstretch0",
  "SB_MotifThree_quantile_hh",
  "FC_LocalSimple_mean1_tauresrat",
  "CO_Embed2_Dist_tau_d_expfit_meandiff",
  "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
  "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
  "SB_TransitionMatrix_3ac_sumdiagcov",
  "PD_PeriodicityWang_th0_01",
]);

export interface BoundFeatureResult {
  /** The 22 canonical feature names, extractor order. */
  names: readonly string[];
  /** One value per name; NaN wherever the matching flag is true. */
  values: number[];
  /** Marker indicators: true means the extractor declined the feature. */
  flags: boolean[];
}

export interface BatchItemError {
  index: number;
  message: string;
}

export interface BoundBatchResult {
  /** One entry per input series, input order; null where that series failed validation. */
  results: (BoundFeatureResult | null)[];
  errors: BatchItemError[];
}

interface ExtractRecord {
  id: string;
  features: Record<string, number | null>;
  special: Record<string, string>;
}

function validateSeries(samples: ArrayLike<number>): string | null {
  if (samples.length === 0) {
    return "empty series";
  }
  for (let i = 0; i < samples.length; i++) {
    const v = samples[i];
    if (typeof v !== "number" || !Number.isFinite(v)) {
      return `non-finite sample at index ${i}`;
    }
  }
  return null;
}

/** Shortest round-trip decimal for a double; what the extractor's own
 * loader parses back to the identical bit pattern. */
function formatSample(v: number): string {
  return String(v);
}

function runExtractor(rows: string[], threads: number): ExtractRecord[] {
  const python = process.env.CANON22_PYTHON ?? "python3";
  const dir = mkdtempSync(join(tmpdir(), "canon22-bind-"));
  try {
    const input = join(dir, "input.tsv");
    const output = join(dir, "features.json");
    writeFileSync(input, rows.join("\n") + "\n");
    const proc = spawnSync(
      python,
      [
        "-m",
        "canon22",
        "extract",
        "--input",
        input,
        "--output",
        output,
        "--format",
        "json",
        "--threads",
        String(threads),
      ],
      { encoding: "utf8" },
    );
    if (proc.error) {
      throw new Error(`failed to launch extractor (${python}): ${proc.error.message}`);
    }
    if (proc.status !== 0) {
      throw new Error(
        `extractor exited with status ${proc.status}: ${proc.stderr.trim()}`,
      );
    }
    return JSON.parse(readFileSync(output, "utf8")) as ExtractRecord[];
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function toResult(record: ExtractRecord): BoundFeatureResult {
  const values = new Array<number>(FEATURE_NAMES.length);
  const flags = new Array<boolean>(FEATURE_NAMES.length);
  FEATURE_NAMES.forEach((name, k) => {
    const v = record.features[name];
    if (v === null || v === undefined) {
      if (!(name in record.special)) {
        throw new Error(`extractor omitted feature ${name} without a marker`);
      }
      values[k] = NaN;
      flags[k] = true;
    } else {
      values[k] = v;
      flags[k] = false;
    }
  });
  return { names: FEATURE_NAMES, values, flags };
}

function toRow(samples: ArrayLike<number>): string {
  const cells = new Array<string>(samples.length + 1);
  cells[0] = "0"; // placeholder label; extraction ignores it
  for (let i = 0; i < samples.length; i++) {
    cells[i + 1] = formatSample(samples[i]);
  }
  return cells.join("\t");
}

/**
 * All 22 features of one series. Values are bit-identical to the
 * extractor's own output; markers come back as NaN with the flag set.
 * Throws on empty input or the first non-finite sample.
 */
export function boundExtract(samples: ArrayLike<number>): BoundFeatureResult {
  const bad = validateSeries(samples);
  if (bad !== null) {
    throw new Error(bad);
  }
  const records = runExtractor([toRow(samples)], 1);
  if (records.length !== 1) {
    throw new Error(`extractor returned ${records.length} records for one series`);
  }
  return toResult(records[0]);
}

/**
 * Batch extraction, one extractor invocation for the whole list.
 * Order-preserving and independent of the thread count. Series that
 * fail validation do not abort the batch: their slot is null and the
 * failure is collected in errors.
 */
export function boundBatchExtract(
  seriesList: ArrayLike<number>[],
  threads = 1,
): BoundBatchResult {
  if (!Number.isInteger(threads) || threads < 1) {
    throw new Error("threads must be a positive integer");
  }
  const errors: BatchItemError[] = [];
  const rows: string[] = [];
  const rowOf = new Array<number>(seriesList.length).fill(-1);
  seriesList.forEach((samples, index) => {
    const bad = validateSeries(samples);
    if (bad !== null) {
      errors.push({ index, message: bad });
      return;
    }
    rowOf[index] = rows.length;
    rows.push(toRow(samples));
  });
  const records = rows.length > 0 ? runExtractor(rows, threads) : [];
  if (records.length !== rows.length) {
    throw new Error(
      `extractor returned ${records.length} records for ${rows.length} series`,
    );
  }
  const results = seriesList.map((_, index) =>
    rowOf[index] >= 0 ? toResult(records[rowOf[index]]) : null,
  );
  return { results, errors };
}
