import { describe, expect, it } from "vitest";
import { isValidQid, normalizeQidInput } from "../src/validate";

describe("isValidQid", () => {
  it("accepts Q plus digits", () => {
    expect(isValidQid("Q83478")).toBe(true);
    expect(isValidQid("Q1")).toBe(true);
  });

  it("rejects everything else", () => {
    for (const bad of ["83478", "Q", "q83478", "Q12x", "xyz", "", " Q1"]) {
      expect(isValidQid(bad)).toBe(false);
    }
  });
});

describe("normalizeQidInput", () => {
  it("trims and upcases a leading q", () => {
    expect(normalizeQidInput("  Q571 ")).toBe("Q571");
    expect(normalizeQidInput("q571")).toBe("Q571");
  });

  it("leaves invalid content for validation to reject", () => {
    expect(isValidQid(normalizeQidInput("xyz"))).toBe(false);
  });
});
