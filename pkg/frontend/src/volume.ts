/**
 * Event-count volume views and the EVTH wire format.
 *
 * A volume is a dense float32 tensor of shape (T, 2, H, W) in C order:
 * per-timestep, per-polarity event counts. Views borrow the caller's typed
 * array without copying; serialization to EVTH bytes is the only copy.
 *
 * EVTH layout (little-endian): magic "EVTH", version u16, dims u32 x 4
 * (T, 2, H, W), then T*2*H*W float32 values.
 */

import { BoundaryError } from './errors';

export type VolumeShape = readonly [number, number, number, number];

const EVTH_MAGIC = 'EVTH';
const EVTH_VERSION = 1;
const HEADER_BYTES = 4 + 2 + 4 * 4;

function checkShape(shape: VolumeShape): void {
  if (shape.length !== 4) {
    throw new BoundaryError(`expected 4-axis shape (T, 2, H, W), got ${shape.length} axes`);
  }
  for (const d of shape) {
    if (!Number.isInteger(d) || d < 1) {
      throw new BoundaryError(`shape must be positive integers, got (${shape.join(', ')})`);
    }
  }
  if (shape[1] !== 2) {
    throw new BoundaryError(`polarity axis must be 2, got ${shape[1]} (shape (${shape.join(', ')}))`);
  }
}

/** Borrowed, validated view over a contiguous float32 volume. */
export class VolumeView {
  readonly data: Float32Array;
  readonly shape: VolumeShape;

  constructor(data: Float32Array, shape: VolumeShape) {
    if (!(data instanceof Float32Array)) {
      const got = (data as object)?.constructor?.name ?? typeof data;
      throw new BoundaryError(`expected Float32Array, got ${got}`);
    }
    checkShape(shape);
    const expected = shape[0] * shape[1] * shape[2] * shape[3];
    if (data.length !== expected) {
      throw new BoundaryError(
        `buffer length mismatch: expected ${expected} elements for shape ` +
          `(${shape.join(', ')}), got ${data.length}`,
      );
    }
    this.data = data; // zero-copy ingress
    this.shape = [shape[0], shape[1], shape[2], shape[3]];
  }

  get elementCount(): number {
    return this.data.length;
  }
}

/**
 * Split one contiguous (B, T, 2, H, W) buffer into B zero-copy views.
 */
export function batchViews(data: Float32Array, batchShape: readonly number[]): VolumeView[] {
  if (batchShape.length !== 5) {
    throw new BoundaryError(`expected 5-axis batch shape (B, T, 2, H, W), got ${batchShape.length} axes`);
  }
  const [b, t, p, h, w] = batchShape;
  if (!Number.isInteger(b) || b < 1) {
    throw new BoundaryError(`batch axis must be a positive integer, got ${b}`);
  }
  const per = t * p * h * w;
  if (data.length !== b * per) {
    throw new BoundaryError(
      `buffer length mismatch: expected ${b * per} elements for shape (${batchShape.join(', ')}), got ${data.length}`,
    );
  }
  const views: VolumeView[] = [];
  for (let i = 0; i < b; i++) {
    views.push(new VolumeView(data.subarray(i * per, (i + 1) * per), [t, p, h, w]));
  }
  return views;
}

/** Serialize a view to EVTH bytes. */
export function encodeEvth(view: VolumeView): Buffer {
  const buf = Buffer.alloc(HEADER_BYTES + view.elementCount * 4);
  buf.write(EVTH_MAGIC, 0, 'ascii');
  buf.writeUInt16LE(EVTH_VERSION, 4);
  for (let i = 0; i < 4; i++) {
    buf.writeUInt32LE(view.shape[i], 6 + 4 * i);
  }
  for (let i = 0; i < view.elementCount; i++) {
    buf.writeFloatLE(view.data[i], HEADER_BYTES + 4 * i);
  }
  return buf;
}

/** Parse EVTH bytes into a fresh view. */
export function decodeEvth(bytes: Buffer): VolumeView {
  if (bytes.length < HEADER_BYTES) {
    throw new BoundaryError(`truncated EVTH header: ${bytes.length} bytes`);
  }
  const magic = bytes.toString('ascii', 0, 4);
  if (magic !== EVTH_MAGIC) {
    throw new BoundaryError(`bad magic ${JSON.stringify(magic)}, expected ${EVTH_MAGIC}`);
  }
  const version = bytes.readUInt16LE(4);
  if (version !== EVTH_VERSION) {
    throw new BoundaryError(`unsupported EVTH version ${version}`);
  }
  const shape: number[] = [];
  for (let i = 0; i < 4; i++) {
    shape.push(bytes.readUInt32LE(6 + 4 * i));
  }
  const count = shape[0] * shape[1] * shape[2] * shape[3];
  if (bytes.length !== HEADER_BYTES + count * 4) {
    throw new BoundaryError(
      `payload is ${bytes.length - HEADER_BYTES} bytes, header implies ${count * 4}`,
    );
  }
  const data = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    data[i] = bytes.readFloatLE(HEADER_BYTES + 4 * i);
  }
  return new VolumeView(data, shape as unknown as VolumeShape);
}
