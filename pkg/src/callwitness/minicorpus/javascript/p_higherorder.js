function double(x) {
  return x * 2;
}
function isBig(x) {
  return x > 4;
}
function transform(xs) {
  return xs.map(double).filter(isBig);
}
console.log(transform([1, 2, 3, 4]).join(","));
