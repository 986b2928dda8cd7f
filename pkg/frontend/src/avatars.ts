// Deterministic identicon-style avatars seeded by role id: same role, same
// colors and initials everywhere, no asset pipeline.

export interface Avatar {
  initials: string;
  hue: number;
  background: string;
  foreground: string;
}

function hashString(value: string): number {
  let hash = 2166136261;
  for (let i = 0; i < value.length; i++) {
    hash ^= value.charCodeAt(i);
    hash = Math.imul(hash, 16777619);
  }
  return hash >>> 0;
}

export function avatarFor(roleId: string, displayName?: string): Avatar {
  const hue = hashString(roleId) % 360;
  const source = displayName || roleId;
  const parts = source.split(/[\s_-]+/).filter(Boolean);
  const initials = parts
    .slice(0, 2)
    .map((part) => part[0]!.toUpperCase())
    .join("");
  return {
    initials: initials || "?",
    hue,
    background: `hsl(${hue}, 55%, 82%)`,
    foreground: `hsl(${hue}, 65%, 26%)`,
  };
}
