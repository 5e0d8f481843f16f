function makeScaler(factor) {
  function scale(x) {
    return x * factor;
  }
  return scale;
}
function apply(fn, xs) {
  const out = [];
  for (let i = 0; i < xs.length; i++) {
    out.push(fn(xs[i]));
  }
  return out;
}
function run(xs) {
  const byThree = makeScaler(3);
  return apply(byThree, xs).join(",");
}
console.log(run([1, 2]));
