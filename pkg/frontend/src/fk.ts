/** Forward kinematics over the chain config the server sends at connect
 * time, so the arm is drawn from broadcast joint states with no second
 * geometry source. Mirrors the server composition: each joint applies its
 * fixed offset, then its own rotation about `axis`; the tool transform
 * caps the product.
 */

import type { ChainConfig } from "./protocol.js";
import type { PoseLike } from "./math3d.js";
import { composePose, quatFromAxisAngle } from "./math3d.js";

const IDENTITY: PoseLike = { position: [0, 0, 0], orientation: [1, 0, 0, 0] };

/** Base-frame pose of each joint frame plus the tool frame last (N + 1). */
export function jointFrames(chain: ChainConfig, q: number[]): PoseLike[] {
  if (q.length !== chain.joints.length) {
    throw new Error(`chain '${chain.name}' has ${chain.joints.length} joints, got ${q.length} values`);
  }
  const frames: PoseLike[] = [];
  let t = IDENTITY;
  chain.joints.forEach((joint, i) => {
    t = composePose(t, joint.offset);
    frames.push(t);
    t = composePose(t, {
      position: [0, 0, 0],
      orientation: quatFromAxisAngle(joint.axis, q[i]!),
    });
  });
  frames.push(composePose(t, chain.tool));
  return frames;
}

export function forwardKinematics(chain: ChainConfig, q: number[]): PoseLike {
  const frames = jointFrames(chain, q);
  return frames[frames.length - 1]!;
}
