import { ZeroVarianceVector } from "./errors.js";

export type Metric = "one-minus-pearson" | "euclidean";

export const METRICS: readonly Metric[] = ["one-minus-pearson", "euclidean"];

function centered(v: number[]): { d: number[]; sumSq: number } {
  let mean = 0;
  for (const x of v) mean += x;
  mean /= v.length;
  const d = new Array<number>(v.length);
  let sumSq = 0;
  for (let i = 0; i < v.length; i++) {
    d[i] = v[i] - mean;
    sumSq += d[i] * d[i];
  }
  return { d, sumSq };
}

function euclidean(a: number[], b: number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) {
    const diff = a[i] - b[i];
    s += diff * diff;
  }
  return Math.sqrt(s);
}

/**
 * Pairwise dissimilarity matrix over the rows of `vectors`.
 *
 * For "one-minus-pearson" every row must have nonzero variance
 * (ZeroVarianceVector names the offending condition). Identical rows get
 * an exact 0: the correlation numerator and the centered sum of squares
 * are the same sum in the same order, and sqrt(x*x) == x in doubles.
 */
export function buildRdmMatrix(
  vectors: number[][],
  conditionIds: string[],
  metric: Metric = "one-minus-pearson",
): number[][] {
  const n = vectors.length;
  const out: number[][] = Array.from({ length: n }, () => new Array<number>(n).fill(0));

  if (metric === "euclidean") {
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const d = euclidean(vectors[i], vectors[j]);
        out[i][j] = d;
        out[j][i] = d;
      }
    }
    return out;
  }

  const cent = vectors.map(centered);
  cent.forEach((c, i) => {
    if (c.sumSq === 0) throw new ZeroVarianceVector(conditionIds[i]);
  });
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const a = cent[i];
      const b = cent[j];
      let num = 0;
      for (let k = 0; k < a.d.length; k++) num += a.d[k] * b.d[k];
      const d = 1 - num / Math.sqrt(a.sumSq * b.sumSq);
      out[i][j] = d;
      out[j][i] = d;
    }
  }
  return out;
}
