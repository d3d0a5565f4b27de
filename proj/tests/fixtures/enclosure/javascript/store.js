export class Store {
  #items = new Map();

  constructor(limit) {
    this.limit = limit;
  }

  get size() {
    return this.#items.size;
  }

  set(key, value) {
    if (this.#items.size >= this.limit) {
      throw new Error(`full: ${key}`);
    }
    this.#items.set(key, value);
  }

  static from(entries) {
    const s = new Store(entries.length);
    for (const [k, v] of entries) s.set(k, v);
    return s;
  }
}
