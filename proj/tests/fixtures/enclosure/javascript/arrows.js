const add = (a, b) => {
  return a + b;
};

const double = function (x) {
  return x * 2;
};

export default async function load(url) {
  const res = await fetch(url);
  return res.json();
}

const api = {
  ping() {
    return "pong";
  },
  echo: (x) => {
    return x;
  },
};
