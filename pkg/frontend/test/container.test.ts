import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  ContainerFormatError,
  NdArray,
  loadContainer,
  parseContainer,
  serializeContainer,
  writeContainer,
} from "../src/container";

let tmpDir: string;

beforeAll(() => {
  tmpDir = fs.mkdtempSync(path.join(os.tmpdir(), "figplots-"));
});

afterAll(() => {
  fs.rmSync(tmpDir, { recursive: true, force: true });
});

function vec(values: number[]): NdArray {
  return { dtype: "f64", shape: [values.length], data: Float64Array.from(values) };
}

function sampleArrays(): Map<string, NdArray> {
  const arrays = new Map<string, NdArray>();
  arrays.set("pes", vec([1e-3, 2.5e-4, 0.125, -0.0, 7.75]));
  arrays.set("grid2", {
    dtype: "f64",
    shape: [2, 3],
    data: Float64Array.from([1, 2, 3, 4, 5, 6]),
  });
  arrays.set("amps", {
    dtype: "c128",
    shape: [2],
    data: Float64Array.from([0.5, -0.25, 1e-18, 3.0]),
  });
  return arrays;
}

describe("container round trip", () => {
  it("is bitwise exact through write and load", () => {
    const file = path.join(tmpDir, "rt.qls1");
    const arrays = sampleArrays();
    writeContainer(file, arrays, { tier: "ci-small" }, [{ note: 1 }]);
    const back = loadContainer(file);
    expect([...back.arrays.keys()]).toEqual([...arrays.keys()]);
    for (const [name, arr] of arrays) {
      const got = back.arrays.get(name)!;
      expect(got.dtype).toBe(arr.dtype);
      expect(got.shape).toEqual(arr.shape);
      expect(Buffer.from(got.data.buffer).equals(Buffer.from(arr.data.buffer))).toBe(true);
    }
    expect(back.config).toEqual({ tier: "ci-small" });
    expect(back.diagnostics).toEqual([{ note: 1 }]);
  });

  it("re-serializes loaded containers to identical bytes", () => {
    const blob = serializeContainer(sampleArrays(), { k: [1, 2] }, []);
    const parsed = parseContainer(blob);
    const again = serializeContainer(
      parsed.arrays,
      parsed.config,
      parsed.diagnostics
    );
    expect(again.equals(blob)).toBe(true);
  });

  it("accepts a header-only container", () => {
    const blob = serializeContainer(new Map(), { tier: "ci-small" });
    const parsed = parseContainer(blob);
    expect(parsed.arrays.size).toBe(0);
    expect((parsed.config as { tier: string }).tier).toBe("ci-small");
  });
});

describe("container format errors", () => {
  it("rejects bad magic", () => {
    const blob = Buffer.concat([Buffer.from("NOPE"), Buffer.alloc(20)]);
    expect(() => parseContainer(blob)).toThrow(ContainerFormatError);
  });

  it("rejects truncated payloads", () => {
    const blob = serializeContainer(sampleArrays());
    expect(() => parseContainer(blob.subarray(0, blob.length - 16))).toThrow(
      ContainerFormatError
    );
  });

  it("rejects truncated headers", () => {
    const blob = serializeContainer(new Map());
    const prefix = Buffer.from(blob);
    prefix.writeBigUInt64LE(BigInt(100000), 4);
    expect(() => parseContainer(prefix)).toThrow(/truncated/);
  });

  it("reports missing files as container errors", () => {
    expect(() => loadContainer(path.join(tmpDir, "missing.qls1"))).toThrow(
      ContainerFormatError
    );
  });
});
