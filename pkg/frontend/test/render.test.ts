import { execFileSync, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv.js";
import { MissingColumnsError, renderFigure } from "../src/render.js";
import { figureSpec } from "../src/spec.js";

const fixture = (name: string) =>
  readFileSync(join(__dirname, "fixtures", name), "utf8");
const golden = (name: string) =>
  readFileSync(join(__dirname, "golden", name), "utf8");

describe("csv parsing", () => {
  it("reads the harness aggregate header", () => {
    const table = parseCsv(fixture("aggregates_fig7.csv"));
    expect(table.columns).toContain("mean_gamma_L_dB");
    expect(table.rows).toHaveLength(6);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(/expected 2 cells/);
  });
});

describe("figure rendering", () => {
  it.each(["fig3", "fig7", "fig8"] as const)(
    "%s matches its golden byte for byte",
    (preset) => {
      const svg = renderFigure(fixture(`aggregates_${preset}.csv`), preset);
      expect(svg).toBe(golden(`${preset}.svg`));
    },
  );

  it("is deterministic across repeated renders", () => {
    const a = renderFigure(fixture("aggregates_fig3.csv"), "fig3");
    const b = renderFigure(fixture("aggregates_fig3.csv"), "fig3");
    expect(a).toBe(b);
  });

  it("never mutates the input text", () => {
    const text = fixture("aggregates_fig8.csv");
    const copy = text.slice();
    renderFigure(text, "fig8");
    expect(text).toBe(copy);
  });

  it("reports a column diff when the schema does not match", () => {
    const table = fixture("aggregates_fig7.csv")
      .split("\n")
      .map((line) => line.split(",").slice(0, 10).join(","))
      .join("\n");
    try {
      renderFigure(table, "fig7");
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnsError);
      expect((err as MissingColumnsError).missing).toContain("mean_gamma_L_dB");
    }
  });

  it("refuses to draw an empty plot", () => {
    const header = fixture("aggregates_fig7.csv").split("\n")[0];
    expect(() => renderFigure(header + "\n", "fig7")).toThrow(/no aggregate rows/);
  });

  it("rejects unknown presets with the available list", () => {
    expect(() => figureSpec("fig99")).toThrow(/fig3/);
  });
});

describe("command line", () => {
  const cli = join(__dirname, "..", "dist", "cli.js");

  it("writes an SVG and exits zero", () => {
    const out = mkdtempSync(join(tmpdir(), "risac-render-"));
    execFileSync("node", [
      cli, "render",
      "--csv", join(__dirname, "fixtures", "aggregates_fig3.csv"),
      "--preset", "fig3", "--out", out,
    ]);
    const svg = readFileSync(join(out, "fig3.svg"), "utf8");
    expect(svg).toBe(golden("fig3.svg"));
  });

  it("exits nonzero with a column diff on a mismatched CSV", () => {
    const out = mkdtempSync(join(tmpdir(), "risac-render-"));
    const broken = join(out, "broken.csv");
    writeFileSync(broken, "preset,grid_value\nfig7,25\n");
    const proc = spawnSync("node", [
      cli, "render", "--csv", broken, "--preset", "fig7", "--out", out,
    ], { encoding: "utf8" });
    expect(proc.status).toBe(1);
    expect(proc.stderr).toMatch(/missing required columns/);
    expect(proc.stderr).toMatch(/mean_gamma_L_dB/);
  });

  it("exits 2 on usage errors", () => {
    const proc = spawnSync("node", [cli, "plot"], { encoding: "utf8" });
    expect(proc.status).toBe(2);
    expect(proc.stderr).toMatch(/usage/);
  });
});
