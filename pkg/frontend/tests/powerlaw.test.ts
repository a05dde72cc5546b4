import { describe, expect, it } from "vitest";

import { fitLogLogSlope } from "../src/powerlaw";

function range(n: number): number[] {
  return Array.from({ length: n }, (_, i) => i + 1);
}

describe("fitLogLogSlope", () => {
  it("recovers the exponent of an exact power law", () => {
    const xs = range(50);
    const ys = xs.map((x) => 3 / (x * x));
    const fit = fitLogLogSlope(xs, ys);
    expect(fit.reason).toBeNull();
    expect(fit.used).toBe(50);
    expect(fit.skipped).toBe(0);
    expect(Math.abs(fit.slope + 2)).toBeLessThan(1e-12);
    expect(Math.abs(fit.intercept - Math.log(3))).toBeLessThan(1e-12);
  });

  it("is invariant to scaling y", () => {
    const xs = range(20);
    const ys = xs.map((x) => 5 * x ** -0.7);
    const a = fitLogLogSlope(xs, ys);
    const b = fitLogLogSlope(xs, ys.map((y) => y * 7));
    expect(Math.abs(a.slope - b.slope)).toBeLessThan(1e-12);
  });

  it("skips non-positive and non-finite coordinates, counting them", () => {
    const xs = [0, 1, 2, 3, 4, 5];
    const ys = [9, 9, -1, NaN, 3, 1];
    const fit = fitLogLogSlope(xs, ys);
    // x=0, y=-1 and y=NaN drop out
    expect(fit.used).toBe(3);
    expect(fit.skipped).toBe(3);
    expect(fit.reason).toBeNull();
    expect(fit.slope).toBeLessThan(0);
  });

  it("reports insufficient points below two usable pairs", () => {
    for (const [xs, ys] of [
      [[], []],
      [[3], [7]],
      [[0, 3], [7, 7]],
    ] as [number[], number[]][]) {
      const fit = fitLogLogSlope(xs, ys);
      expect(fit.reason).toBe("insufficient points");
      expect(Number.isNaN(fit.slope)).toBe(true);
    }
  });

  it("refuses a slope when all points share one x", () => {
    const fit = fitLogLogSlope([4, 4, 4], [1, 2, 3]);
    expect(fit.reason).toBe("degenerate x range");
    expect(Number.isNaN(fit.slope)).toBe(true);
  });

  it("rejects mismatched array lengths", () => {
    expect(() => fitLogLogSlope([1, 2], [1])).toThrow(/length/);
  });
});
