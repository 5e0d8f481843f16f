function area(w, h) {
  return w * h;
}
function perimeter(w, h) {
  return 2 * (w + h);
}
const compute = area;
const outline = perimeter;
function report(w, h) {
  return "area=" + compute(w, h) + " perimeter=" + outline(w, h);
}
console.log(report(3, 4));
