function sum(acc, x) {
  return acc + x;
}
function product(acc, x) {
  return acc * x;
}
function fold(xs) {
  const s = xs.reduce(sum, 0);
  const p = xs.reduce(product, 1);
  return `s=${s} p=${p}`;
}
console.log(fold([1, 2, 3, 4]));
