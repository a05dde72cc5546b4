export interface SlopeFit {
  slope: number;
  intercept: number;
  /** points that entered the fit */
  used: number;
  /** points dropped because either coordinate was non-positive or non-finite */
  skipped: number;
  reason: string | null;
}

/**
 * Ordinary least squares on (ln x, ln y). Log axes cannot show zero or
 * negative values, so those points are skipped and counted rather than
 * treated as an error.
 */
export function fitLogLogSlope(xs: number[], ys: number[]): SlopeFit {
  if (xs.length !== ys.length) {
    throw new Error(`coordinate arrays differ in length: ${xs.length} vs ${ys.length}`);
  }
  const lx: number[] = [];
  const ly: number[] = [];
  for (let i = 0; i < xs.length; i++) {
    const x = xs[i];
    const y = ys[i];
    if (Number.isFinite(x) && Number.isFinite(y) && x > 0 && y > 0) {
      lx.push(Math.log(x));
      ly.push(Math.log(y));
    }
  }
  const used = lx.length;
  const skipped = xs.length - used;
  if (used < 2) {
    return { slope: NaN, intercept: NaN, used, skipped, reason: "insufficient points" };
  }

  let xMean = 0;
  let yMean = 0;
  for (let i = 0; i < used; i++) {
    xMean += lx[i];
    yMean += ly[i];
  }
  xMean /= used;
  yMean /= used;

  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < used; i++) {
    const dx = lx[i] - xMean;
    sxx += dx * dx;
    sxy += dx * (ly[i] - yMean);
  }
  if (sxx === 0) {
    // every surviving point shares one x; a slope is meaningless
    return { slope: NaN, intercept: NaN, used, skipped, reason: "degenerate x range" };
  }
  const slope = sxy / sxx;
  return { slope, intercept: yMean - slope * xMean, used, skipped, reason: null };
}
