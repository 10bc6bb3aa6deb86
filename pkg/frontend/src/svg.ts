/** Plot coordinate as fixed decimal text, so output bytes never drift. */
export function fmt(x: number): string {
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Shortest label that round-trips the tick value. */
export function fmtTick(x: number): string {
  const s = String(parseFloat(x.toPrecision(10)));
  return s === "-0" ? "0" : s;
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body = ""
): string {
  const head = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
  return body === "" ? `<${tag}${head}/>` : `<${tag}${head}>${body}</${tag}>`;
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">` +
    `${body}</svg>\n`
  );
}
