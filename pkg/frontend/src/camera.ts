// Orbit camera and point projection. View-only math: the scene geometry it
// transforms comes straight out of snapshots.

export interface OrbitCamera {
  azimuth: number; // degrees around +z
  elevation: number; // degrees above the xy plane
  distance: number; // studs from the target
  target: [number, number, number];
}

export interface Viewport {
  width: number;
  height: number;
}

export const DEFAULT_CAMERA: OrbitCamera = {
  azimuth: 35,
  elevation: 28,
  distance: 26,
  target: [2, 1, 1],
};

const DEG = Math.PI / 180;

export function cameraEye(cam: OrbitCamera): [number, number, number] {
  const az = cam.azimuth * DEG;
  const el = cam.elevation * DEG;
  const r = cam.distance * Math.cos(el);
  return [
    cam.target[0] + r * Math.cos(az),
    cam.target[1] + r * Math.sin(az),
    cam.target[2] + cam.distance * Math.sin(el),
  ];
}

/** Apply a row-major 4x4 pose (affine) to a point. */
export function transformPoint(m: number[], p: [number, number, number]): [number, number, number] {
  return [
    m[0] * p[0] + m[1] * p[1] + m[2] * p[2] + m[3],
    m[4] * p[0] + m[5] * p[1] + m[6] * p[2] + m[7],
    m[8] * p[0] + m[9] * p[1] + m[10] * p[2] + m[11],
  ];
}

function sub(a: number[], b: number[]): [number, number, number] {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: number[], b: number[]): [number, number, number] {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

function norm(a: number[]): [number, number, number] {
  const n = Math.hypot(a[0], a[1], a[2]) || 1;
  return [a[0] / n, a[1] / n, a[2] / n];
}

function dot(a: number[], b: number[]): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/**
 * Project a world point to canvas pixels. Returns null when the point sits
 * behind the eye. Scene +z is screen-up; perspective with ~50 degree fov.
 */
export function project(
  p: [number, number, number],
  cam: OrbitCamera,
  view: Viewport,
): [number, number] | null {
  const eye = cameraEye(cam);
  const forward = norm(sub(cam.target, eye));
  const right = norm(cross(forward, [0, 0, 1]));
  const up = cross(right, forward);
  const rel = sub(p, eye);
  const depth = dot(rel, forward);
  if (depth < 0.05) return null;
  const fov = 50 * DEG;
  const scale = view.height / (2 * Math.tan(fov / 2));
  const sx = (dot(rel, right) / depth) * scale + view.width / 2;
  const sy = view.height / 2 - (dot(rel, up) / depth) * scale;
  return [sx, sy];
}

export function orbitBy(cam: OrbitCamera, dAzimuth: number, dElevation: number): OrbitCamera {
  return {
    ...cam,
    azimuth: (cam.azimuth + dAzimuth) % 360,
    elevation: Math.max(-89, Math.min(89, cam.elevation + dElevation)),
  };
}

export function zoomBy(cam: OrbitCamera, factor: number): OrbitCamera {
  return { ...cam, distance: Math.max(4, Math.min(120, cam.distance * factor)) };
}
