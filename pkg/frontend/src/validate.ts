const QID_RE = /^Q[0-9]+$/;

export function isValidQid(value: string): boolean {
  return QID_RE.test(value);
}

/** Normalize curator input: trim and uppercase a leading q. */
export function normalizeQidInput(value: string): string {
  const trimmed = value.trim();
  return trimmed.startsWith("q") ? "Q" + trimmed.slice(1) : trimmed;
}
