const twice = (x) => x * 2;
const shift = (x) => x + 1;
const addUp = (xs) => {
  let sum = 0;
  for (let i = 0; i < xs.length; i++) {
    sum = sum + twice(shift(xs[i]));
  }
  return sum;
};
console.log(addUp([1, 2, 3]));
