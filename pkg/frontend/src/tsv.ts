export type Row = Record<string, string>;

export function parseTsv(text: string): Row[] {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) return [];
  const header = lines[0].split("\t");
  return lines.slice(1).map((line) => {
    const cells = line.split("\t");
    const row: Row = {};
    header.forEach((name, i) => {
      row[name] = cells[i] ?? "";
    });
    return row;
  });
}

export function parseWideTsv(text: string): { columns: string[]; rows: string[][] } {
  const lines = text.split("\n").filter((l) => l.length > 0);
  return {
    columns: lines.length ? lines[0].split("\t") : [],
    rows: lines.slice(1).map((l) => l.split("\t")),
  };
}
