// Virtual stylus pad: pointer drag in pad pixels -> displacement in cm.
// 1 cm = 40 px, so the +-5 cm working range fills a 400 px pad; with the
// default 0.2 (m/s)/cm mapping that commands about +-1 m/s.

export const PX_PER_CM = 40;
export const PAD_RANGE_CM = 5;

/**
 * Drag vector (pad px, screen coordinates: +y down) to stylus cm in world
 * axes (+y toward the wall), clamped to the pad's working range.
 */
export function dragToStylusCm(dxPx: number, dyPx: number): [number, number] {
  let x = dxPx / PX_PER_CM;
  let y = -dyPx / PX_PER_CM; // screen down = world -y
  const r = Math.hypot(x, y);
  if (r > PAD_RANGE_CM) {
    x *= PAD_RANGE_CM / r;
    y *= PAD_RANGE_CM / r;
  }
  return [x, y];
}

/** Mirror of the server-side map, for displaying the commanded velocity. */
export function stylusToVelocity(
  cm: readonly number[],
  deadZoneCm: number,
  gainMpsPerCm: number,
): number[] {
  return cm.map((d) => (Math.abs(d) < deadZoneCm ? 0 : gainMpsPerCm * d));
}
