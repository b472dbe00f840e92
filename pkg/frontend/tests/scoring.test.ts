import { describe, expect, it } from "vitest";
import { criLevel, previewFromBands, previewFromFactors, quantizeBand } from "../src/scoring.js";

describe("quantizeBand", () => {
  it("puts edge values into the upper band", () => {
    expect(quantizeBand(0)).toBe(1);
    expect(quantizeBand(1.79)).toBe(1);
    expect(quantizeBand(1.8)).toBe(2);
    expect(quantizeBand(3.6)).toBe(3);
    expect(quantizeBand(5.4)).toBe(4);
    expect(quantizeBand(7.2)).toBe(5);
    expect(quantizeBand(9)).toBe(5);
  });
});

describe("criLevel", () => {
  it("splits 1..25 into the three levels", () => {
    expect(criLevel(1)).toBe("Low");
    expect(criLevel(5)).toBe("Low");
    expect(criLevel(6)).toBe("Medium");
    expect(criLevel(12)).toBe("Medium");
    expect(criLevel(13)).toBe("High");
    expect(criLevel(25)).toBe("High");
  });
});

describe("previewFromFactors", () => {
  it("averages each side before quantizing", () => {
    const p = previewFromFactors([1, 2, 3, 4], [5, 6, 7, 0], [9, 9, 9, 9], [0, 0, 0, 0]);
    expect(p.likelihood).toBe(2); // mean 3.5
    expect(p.impact).toBe(3); // mean 4.5
    expect(p.cri).toBe(6);
    expect(p.level).toBe("Medium");
  });

  it("tops out at CRI 25", () => {
    const nines = [9, 9, 9, 9];
    const p = previewFromFactors(nines, nines, nines, nines);
    expect(p).toEqual({ likelihood: 5, impact: 5, cri: 25, level: "High" });
  });

  it("bottoms out at CRI 1", () => {
    const zeros = [0, 0, 0, 0];
    const p = previewFromFactors(zeros, zeros, zeros, zeros);
    expect(p).toEqual({ likelihood: 1, impact: 1, cri: 1, level: "Low" });
  });
});

describe("previewFromBands", () => {
  it("multiplies the two bands", () => {
    expect(previewFromBands(2, 3)).toEqual({
      likelihood: 2,
      impact: 3,
      cri: 6,
      level: "Medium",
    });
    expect(previewFromBands(5, 5).level).toBe("High");
  });
});
