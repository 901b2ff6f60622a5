import { describe, expect, it } from "vitest";

import { ellipseFromCovariance, worldToScreen } from "../src/render.js";

describe("ellipseFromCovariance", () => {
  it("isotropic covariance gives a circle", () => {
    const spec = ellipseFromCovariance([
      [1, 0],
      [0, 1],
    ]);
    expect(spec.rx).toBeCloseTo(spec.ry, 12);
    expect(spec.rx).toBeCloseTo(2.0, 12); // k=2 times std 1
  });

  it("axis-aligned anisotropy orders the radii", () => {
    const spec = ellipseFromCovariance([
      [4, 0],
      [0, 1],
    ]);
    expect(spec.rx).toBeCloseTo(4.0, 9);
    expect(spec.ry).toBeCloseTo(2.0, 9);
    expect(spec.angle).toBeCloseTo(0, 9);
  });

  it("rotated covariance recovers the rotation", () => {
    // 45-degree rotation of diag(4, 1)
    const c = Math.SQRT1_2;
    const r = [
      [c, -c],
      [c, c],
    ];
    const d = [
      [4, 0],
      [0, 1],
    ];
    const cov = [
      [0, 0],
      [0, 0],
    ];
    for (let i = 0; i < 2; i++)
      for (let j = 0; j < 2; j++)
        for (let k = 0; k < 2; k++)
          for (let l = 0; l < 2; l++)
            cov[i][j] += r[i][k] * d[k][l] * r[j][l];
    const spec = ellipseFromCovariance(cov);
    expect(spec.rx).toBeCloseTo(4.0, 6);
    expect(spec.ry).toBeCloseTo(2.0, 6);
    expect(Math.abs(spec.angle)).toBeCloseTo(Math.PI / 4, 6);
  });

  it("degenerate covariance stays finite", () => {
    const spec = ellipseFromCovariance([
      [0, 0],
      [0, 0],
    ]);
    expect(spec.rx).toBe(0);
    expect(spec.ry).toBe(0);
  });
});

describe("worldToScreen", () => {
  it("flips y and scales", () => {
    const view = { scale: 10, height: 200 };
    expect(worldToScreen(0, 0, view)).toEqual([0, 200]);
    expect(worldToScreen(3, 5, view)).toEqual([30, 150]);
  });
});
