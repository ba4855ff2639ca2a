import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

const CLI = join(__dirname, "..", "dist", "cli.js");
const FIXTURE = join(__dirname, "fixtures", "se_vs_tau_small.csv");

const built = existsSync(CLI);

describe.skipIf(!built)("cli", () => {
  it("renders a family end to end", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    const out = join(dir, "tau.svg");
    execFileSync("node", [CLI, "render", "--family", "se_vs_tau", "--in", FIXTURE, "--out", out]);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain("piecewise K=8");
    expect(svg.startsWith("<svg")).toBe(true);
  });

  it("fails with a nonzero exit on an unknown family", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    expect(() =>
      execFileSync(
        "node",
        [CLI, "render", "--family", "nope", "--in", FIXTURE, "--out", join(dir, "x.svg")],
        { stdio: "pipe" },
      ),
    ).toThrow();
  });

  it("fails with a nonzero exit on a missing input file", () => {
    const dir = mkdtempSync(join(tmpdir(), "figs-"));
    expect(() =>
      execFileSync(
        "node",
        [CLI, "render", "--family", "se_vs_tau", "--in", join(dir, "missing.csv"),
         "--out", join(dir, "x.svg")],
        { stdio: "pipe" },
      ),
    ).toThrow();
  });
});
