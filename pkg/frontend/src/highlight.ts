/**
 * Split a text into alternating plain/marked segments from a span list.
 *
 * Spans are [start, end) offsets into the text as returned by the explain
 * endpoint. They may arrive unordered, overlapping, or partially out of
 * bounds; rendering must still cover the text exactly once, so offsets are
 * clamped, empties dropped, and overlapping or adjacent spans merged before
 * segmentation.
 */

export interface Segment {
  text: string;
  marked: boolean;
}

export function mergeSpans(
  spans: [number, number][],
  length: number,
): [number, number][] {
  const clamped: [number, number][] = [];
  for (const [start, end] of spans) {
    const lo = Math.max(0, Math.min(start, length));
    const hi = Math.max(0, Math.min(end, length));
    if (lo < hi) clamped.push([lo, hi]);
  }
  clamped.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const merged: [number, number][] = [];
  for (const span of clamped) {
    const last = merged[merged.length - 1];
    if (last && span[0] <= last[1]) {
      last[1] = Math.max(last[1], span[1]);
    } else {
      merged.push([span[0], span[1]]);
    }
  }
  return merged;
}

export function segmentText(text: string, spans: [number, number][]): Segment[] {
  const merged = mergeSpans(spans, text.length);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const [start, end] of merged) {
    if (start > cursor) segments.push({ text: text.slice(cursor, start), marked: false });
    segments.push({ text: text.slice(start, end), marked: true });
    cursor = end;
  }
  if (cursor < text.length) segments.push({ text: text.slice(cursor), marked: false });
  return segments;
}
