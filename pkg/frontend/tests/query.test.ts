import { describe, expect, it } from "vitest";

import {
  emptyQuery,
  queryFromHash,
  queryToHash,
  termCount,
  timelineRequest,
  toggleLabel,
  toggleRegionMember,
  validateQuery,
} from "../src/query.js";
import type { SchemaResponse } from "../src/types.js";

const SCHEMA: SchemaResponse = {
  attributes: [
    { name: "state", kind: "categorical", labels: ["A", "B", "C", "UNKNOWN"] },
    { name: "age", kind: "integer_binned", labels: ["0-11", "12-14", "15+", "UNKNOWN"] },
    { name: "perpetrator", kind: "categorical", labels: ["boyfriend", "stranger", "UNKNOWN"] },
  ],
  calendar: { start: "2006-01-01", end: "2014-12-31" },
  location_attribute: "state",
};

describe("term counting", () => {
  it("counts each constrained attribute once and a region once", () => {
    let q = emptyQuery();
    expect(termCount(q)).toBe(0);
    q = toggleLabel(q, "age", "12-14");
    q = toggleLabel(q, "perpetrator", "boyfriend");
    expect(termCount(q)).toBe(2);
    q = toggleRegionMember(q, "A");
    q = toggleRegionMember(q, "B");
    expect(termCount(q)).toBe(3); // a multi-member region is one term
  });

  it("multi-label selection within one attribute is still one term", () => {
    let q = emptyQuery();
    q = toggleLabel(q, "age", "12-14");
    q = toggleLabel(q, "age", "15+");
    expect(termCount(q)).toBe(1);
  });

  it("deselecting the last label removes the term", () => {
    let q = toggleLabel(emptyQuery(), "age", "12-14");
    q = toggleLabel(q, "age", "12-14");
    expect(termCount(q)).toBe(0);
    expect(q.terms).not.toHaveProperty("age");
  });
});

describe("validation", () => {
  it("blocks an empty selection", () => {
    expect(validateQuery(emptyQuery(), SCHEMA)).toContain("select at least one term");
  });

  it("blocks a fourth term with a message", () => {
    let q = emptyQuery();
    q = toggleLabel(q, "age", "12-14");
    q = toggleLabel(q, "perpetrator", "boyfriend");
    q = toggleRegionMember(q, "A");
    expect(validateQuery(q, SCHEMA)).toEqual([]);
    // unknown-to-region but a 4th attribute term via a fresh attribute
    q = toggleLabel(q, "state", "B");
    const errors = validateQuery(q, SCHEMA);
    expect(errors.some((e) => e.includes("at most 3 terms"))).toBe(true);
  });

  it("expresses the boyfriend / 12-14 / eastern-states query", () => {
    let q = emptyQuery();
    q = toggleLabel(q, "perpetrator", "boyfriend");
    q = toggleLabel(q, "age", "12-14");
    q = toggleRegionMember(q, "A");
    q = toggleRegionMember(q, "B");
    q = toggleRegionMember(q, "C");
    expect(validateQuery(q, SCHEMA)).toEqual([]);
    expect(timelineRequest(q)).toEqual({
      conjunction: { perpetrator: ["boyfriend"], age: ["12-14"] },
      region: ["A", "B", "C"],
      window_length: 28,
      stride: 1,
      reference_length: 365,
    });
  });

  it("rejects labels outside the schema", () => {
    const q = toggleLabel(emptyQuery(), "age", "99-100");
    expect(validateQuery(q, SCHEMA).some((e) => e.includes("unknown label"))).toBe(true);
  });

  it("rejects a region when the server has no location attribute", () => {
    const q = toggleRegionMember(emptyQuery(), "A");
    const errors = validateQuery(q, { ...SCHEMA, location_attribute: null });
    expect(errors.some((e) => e.includes("no location attribute"))).toBe(true);
  });

  it("rejects a reference period shorter than the window", () => {
    const q = { ...toggleLabel(emptyQuery(), "age", "12-14"), referenceLength: 7 };
    expect(validateQuery(q, SCHEMA).some((e) => e.includes("reference period"))).toBe(true);
  });
});

describe("URL serialization", () => {
  it("round-trips every field through the hash", () => {
    let q = emptyQuery();
    q = toggleLabel(q, "age", "12-14");
    q = toggleLabel(q, "perpetrator", "boyfriend");
    q = toggleRegionMember(q, "B");
    q = { ...q, windowLength: 14, stride: 7, referenceLength: 180 };
    expect(queryFromHash(queryToHash(q))).toEqual(q);
  });

  it("equal states produce identical URLs regardless of click order", () => {
    let a = emptyQuery();
    a = toggleLabel(a, "age", "12-14");
    a = toggleLabel(a, "age", "15+");
    let b = emptyQuery();
    b = toggleLabel(b, "age", "15+");
    b = toggleLabel(b, "age", "12-14");
    expect(queryToHash(a)).toBe(queryToHash(b));
  });

  it("defaults are omitted from the URL and restored on parse", () => {
    const q = toggleLabel(emptyQuery(), "age", "12-14");
    const hash = queryToHash(q);
    expect(hash).toBe("t.age=12-14");
    expect(queryFromHash(hash)).toEqual(q);
  });

  it("tolerates a leading # and junk keys", () => {
    const q = queryFromHash("#t.age=12-14&unrelated=zzz");
    expect(q.terms).toEqual({ age: ["12-14"] });
  });
});
