/**
 * QLS1 result container reader and writer.
 *
 * Layout:
 *   bytes 0..3     magic "QLS1"
 *   bytes 4..11    little-endian uint64 header length L
 *   bytes 12..12+L UTF-8 JSON header:
 *       {"arrays": [{"name", "dtype" ("f64"|"c128"), "shape", "offset"}, ...],
 *        "config": {...}, "diagnostics": [...]}
 *   remainder      little-endian raw array payloads at the stated offsets
 *                  (relative to the end of the header)
 *
 * Complex arrays ("c128") are interleaved [re, im, re, im, ...] pairs of
 * float64; their `data` view holds 2x the element count.
 */

import * as fs from "fs";

export const MAGIC = "QLS1";

export type DtypeName = "f64" | "c128";

export interface NdArray {
  dtype: DtypeName;
  shape: number[];
  /** Row-major values; for c128 the re/im pairs are interleaved. */
  data: Float64Array;
}

export interface Container {
  arrays: Map<string, NdArray>;
  config: unknown;
  diagnostics: unknown[];
}

export class ContainerFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ContainerFormatError";
  }
}

interface ArrayEntry {
  name: string;
  dtype: DtypeName;
  shape: number[];
  offset: number;
}

function elementCount(shape: number[]): number {
  let n = 1;
  for (const dim of shape) {
    if (!Number.isInteger(dim) || dim < 0) {
      throw new ContainerFormatError(`bad array shape [${shape.join(", ")}]`);
    }
    n *= dim;
  }
  return n;
}

function doublesPerElement(dtype: DtypeName): number {
  if (dtype === "f64") return 1;
  if (dtype === "c128") return 2;
  throw new ContainerFormatError(`unknown dtype '${dtype}'`);
}

/** Parse a QLS1 container from raw bytes. */
export function parseContainer(blob: Buffer, label = "<buffer>"): Container {
  if (blob.length < 12 || blob.toString("latin1", 0, 4) !== MAGIC) {
    throw new ContainerFormatError(`'${label}' is not a QLS1 container`);
  }
  const headerLen = Number(blob.readBigUInt64LE(4));
  if (blob.length < 12 + headerLen) {
    throw new ContainerFormatError(`'${label}' is truncated (header)`);
  }
  let header: {
    arrays?: ArrayEntry[];
    config?: unknown;
    diagnostics?: unknown[];
  };
  try {
    header = JSON.parse(blob.toString("utf-8", 12, 12 + headerLen));
  } catch (exc) {
    throw new ContainerFormatError(`bad container header in '${label}': ${exc}`);
  }
  const payloadStart = 12 + headerLen;
  const payloadLen = blob.length - payloadStart;
  const arrays = new Map<string, NdArray>();
  for (const entry of header.arrays ?? []) {
    if (
      typeof entry.name !== "string" ||
      !Array.isArray(entry.shape) ||
      typeof entry.offset !== "number"
    ) {
      throw new ContainerFormatError(`malformed array entry in '${label}'`);
    }
    const doubles = elementCount(entry.shape) * doublesPerElement(entry.dtype);
    const nbytes = doubles * 8;
    if (entry.offset < 0 || entry.offset + nbytes > payloadLen) {
      throw new ContainerFormatError(
        `array '${entry.name}' in '${label}' extends past the payload`
      );
    }
    const data = new Float64Array(doubles);
    for (let i = 0; i < doubles; i++) {
      data[i] = blob.readDoubleLE(payloadStart + entry.offset + i * 8);
    }
    arrays.set(entry.name, { dtype: entry.dtype, shape: entry.shape, data });
  }
  return {
    arrays,
    config: header.config ?? {},
    diagnostics: header.diagnostics ?? [],
  };
}

/** Load a QLS1 container from disk. */
export function loadContainer(path: string): Container {
  let blob: Buffer;
  try {
    blob = fs.readFileSync(path);
  } catch (exc) {
    throw new ContainerFormatError(`cannot read container '${path}': ${exc}`);
  }
  return parseContainer(blob, path);
}

/** JSON with object keys emitted in sorted order at every level. */
function sortedJson(value: unknown): string {
  if (Array.isArray(value)) {
    return "[" + value.map(sortedJson).join(",") + "]";
  }
  if (value !== null && typeof value === "object") {
    const keys = Object.keys(value as Record<string, unknown>).sort();
    const body = keys.map(
      (k) => JSON.stringify(k) + ":" + sortedJson((value as Record<string, unknown>)[k])
    );
    return "{" + body.join(",") + "}";
  }
  return JSON.stringify(value);
}

/** Serialize named arrays into QLS1 bytes (the reader's exact inverse). */
export function serializeContainer(
  arrays: Map<string, NdArray>,
  config: unknown = {},
  diagnostics: unknown[] = []
): Buffer {
  const entries: ArrayEntry[] = [];
  const chunks: Buffer[] = [];
  let offset = 0;
  for (const [name, arr] of arrays) {
    const doubles = elementCount(arr.shape) * doublesPerElement(arr.dtype);
    if (arr.data.length !== doubles) {
      throw new ContainerFormatError(
        `array '${name}' has ${arr.data.length} doubles, shape needs ${doubles}`
      );
    }
    entries.push({ name, dtype: arr.dtype, shape: arr.shape, offset });
    const chunk = Buffer.alloc(doubles * 8);
    for (let i = 0; i < doubles; i++) {
      chunk.writeDoubleLE(arr.data[i], i * 8);
    }
    chunks.push(chunk);
    offset += chunk.length;
  }
  const headerBytes = Buffer.from(
    sortedJson({ arrays: entries, config, diagnostics }),
    "utf-8"
  );
  const prefix = Buffer.alloc(12);
  prefix.write(MAGIC, 0, "latin1");
  prefix.writeBigUInt64LE(BigInt(headerBytes.length), 4);
  return Buffer.concat([prefix, headerBytes, ...chunks]);
}

/** Write a QLS1 container to disk. */
export function writeContainer(
  path: string,
  arrays: Map<string, NdArray>,
  config: unknown = {},
  diagnostics: unknown[] = []
): void {
  fs.writeFileSync(path, serializeContainer(arrays, config, diagnostics));
}

/** Fetch a required real-valued array or fail with a descriptive error. */
export function requireArray(
  container: Container,
  name: string,
  label: string
): NdArray {
  const arr = container.arrays.get(name);
  if (arr === undefined) {
    const have = [...container.arrays.keys()].sort().join(", ");
    throw new ContainerFormatError(
      `'${label}' has no array '${name}' (available: ${have || "none"})`
    );
  }
  return arr;
}
