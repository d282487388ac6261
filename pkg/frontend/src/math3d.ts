/** Minimal 3D math for rendering and drag control.
 *
 * Quaternions are [w, x, y, z] to match the wire format. Pose composition
 * follows the server convention: compose(a, b) = T_a * T_b (b expressed in
 * a's frame).
 */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

export interface PoseLike {
  position: Vec3;
  orientation: Quat;
}

export const IDENTITY_QUAT: Quat = [1, 0, 0, 0];

export function vadd(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function vsub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function vscale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function vnorm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  if (n === 0) throw new Error("zero quaternion");
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

export function quatMultiply(a: Quat, b: Quat): Quat {
  const [aw, ax, ay, az] = a;
  const [bw, bx, by, bz] = b;
  return [
    aw * bw - ax * bx - ay * by - az * bz,
    aw * bx + ax * bw + ay * bz - az * by,
    aw * by - ax * bz + ay * bw + az * bx,
    aw * bz + ax * by - ay * bx + az * bw,
  ];
}

export function quatConjugate(q: Quat): Quat {
  return [q[0], -q[1], -q[2], -q[3]];
}

export function quatFromAxisAngle(axis: Vec3, angle: number): Quat {
  const n = vnorm(axis);
  if (n === 0) throw new Error("zero rotation axis");
  const half = angle / 2;
  const s = Math.sin(half) / n;
  return [Math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s];
}

export function quatRotate(q: Quat, v: Vec3): Vec3 {
  // v + 2 u x (u x v + w v), same expansion the server uses
  const w = q[0];
  const u: Vec3 = [q[1], q[2], q[3]];
  const inner: Vec3 = [
    u[1] * v[2] - u[2] * v[1] + w * v[0],
    u[2] * v[0] - u[0] * v[2] + w * v[1],
    u[0] * v[1] - u[1] * v[0] + w * v[2],
  ];
  return [
    v[0] + 2 * (u[1] * inner[2] - u[2] * inner[1]),
    v[1] + 2 * (u[2] * inner[0] - u[0] * inner[2]),
    v[2] + 2 * (u[0] * inner[1] - u[1] * inner[0]),
  ];
}

export function quatToMatrix(q: Quat): number[][] {
  const [w, x, y, z] = q;
  return [
    [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
    [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
    [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
  ];
}

export function composePose(a: PoseLike, b: PoseLike): PoseLike {
  return {
    position: vadd(a.position, quatRotate(a.orientation, b.position)),
    orientation: quatMultiply(a.orientation, b.orientation),
  };
}

export function clonePose(p: PoseLike): PoseLike {
  return { position: [...p.position], orientation: [...p.orientation] };
}
