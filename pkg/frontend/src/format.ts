/** Number formatting for display. Formatting is the only transformation the
 * UI applies to server numbers; it never derives new quantities. */

export function fmt(value: number, digits = 6): string {
  return value.toFixed(digits);
}

export function fmtPercent(value: number, digits = 1): string {
  return `${(value * 100).toFixed(digits)}%`;
}
