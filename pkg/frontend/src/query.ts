/** Client-side query state: attribute terms, region members, window
 * parameters. Mirrors the engine's screening constraints (1..3 fixed
 * terms, a region counts as one term) and serializes to the URL hash
 * so any reachable state is shareable. */

import type { SchemaResponse } from "./types.js";

export interface QuerySpec {
  /** attribute -> selected labels (a multi-label term aggregates) */
  terms: Record<string, string[]>;
  region: string[];
  windowLength: number;
  stride: number;
  referenceLength: number;
}

export const MAX_FIXED_TERMS = 3;

export function emptyQuery(): QuerySpec {
  return { terms: {}, region: [], windowLength: 28, stride: 1, referenceLength: 365 };
}

/** Number of fixed terms: one per constrained attribute plus one for a
 * non-empty region set. */
export function termCount(q: QuerySpec): number {
  const attrTerms = Object.values(q.terms).filter((ls) => ls.length > 0).length;
  return attrTerms + (q.region.length > 0 ? 1 : 0);
}

/** Validation errors that block submission; empty array means submittable. */
export function validateQuery(q: QuerySpec, schema: SchemaResponse | null): string[] {
  const errors: string[] = [];
  const n = termCount(q);
  if (n === 0) errors.push("select at least one term");
  if (n > MAX_FIXED_TERMS) errors.push(`at most ${MAX_FIXED_TERMS} terms (a region counts as one)`);
  if (q.windowLength < 1) errors.push("window length must be at least 1 day");
  if (q.stride < 1) errors.push("stride must be at least 1");
  if (q.referenceLength < q.windowLength) {
    errors.push("reference period must be at least as long as the window");
  }
  if (schema) {
    for (const [attr, labels] of Object.entries(q.terms)) {
      const info = schema.attributes.find((a) => a.name === attr);
      if (!info) {
        errors.push(`unknown attribute ${attr}`);
        continue;
      }
      for (const l of labels) {
        if (!info.labels.includes(l)) errors.push(`unknown label ${attr}=${l}`);
      }
    }
    if (q.region.length > 0 && !schema.location_attribute) {
      errors.push("no location attribute configured on the server");
    }
  }
  return errors;
}

/** Toggle one label in a term; removes the attribute key when the last
 * label is deselected so termCount stays honest. */
export function toggleLabel(q: QuerySpec, attr: string, label: string): QuerySpec {
  const current = q.terms[attr] ?? [];
  const next = current.includes(label)
    ? current.filter((l) => l !== label)
    : [...current, label].sort();
  const terms = { ...q.terms };
  if (next.length === 0) delete terms[attr];
  else terms[attr] = next;
  return { ...q, terms };
}

export function toggleRegionMember(q: QuerySpec, member: string): QuerySpec {
  const region = q.region.includes(member)
    ? q.region.filter((m) => m !== member)
    : [...q.region, member].sort();
  return { ...q, region };
}

/** Serialize to a URL hash fragment. Keys sort deterministically so
 * equal states produce equal URLs. */
export function queryToHash(q: QuerySpec): string {
  const params = new URLSearchParams();
  for (const attr of Object.keys(q.terms).sort()) {
    const labels = q.terms[attr];
    if (labels && labels.length > 0) params.set(`t.${attr}`, labels.join("|"));
  }
  if (q.region.length > 0) params.set("region", q.region.join("|"));
  if (q.windowLength !== 28) params.set("w", String(q.windowLength));
  if (q.stride !== 1) params.set("s", String(q.stride));
  if (q.referenceLength !== 365) params.set("ref", String(q.referenceLength));
  return params.toString();
}

export function queryFromHash(hash: string): QuerySpec {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const q = emptyQuery();
  for (const [key, value] of params.entries()) {
    if (key.startsWith("t.")) {
      const labels = value.split("|").filter((l) => l.length > 0);
      if (labels.length > 0) q.terms[key.slice(2)] = labels.sort();
    } else if (key === "region") {
      q.region = value.split("|").filter((m) => m.length > 0).sort();
    } else if (key === "w") q.windowLength = parseInt(value, 10) || 28;
    else if (key === "s") q.stride = parseInt(value, 10) || 1;
    else if (key === "ref") q.referenceLength = parseInt(value, 10) || 365;
  }
  return q;
}

/** Request body for POST /v1/timeline. */
export function timelineRequest(q: QuerySpec): object {
  return {
    conjunction: q.terms,
    region: q.region.length > 0 ? q.region : null,
    window_length: q.windowLength,
    stride: q.stride,
    reference_length: q.referenceLength,
  };
}
