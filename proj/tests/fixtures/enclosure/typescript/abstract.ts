export abstract class Shape {
  abstract area(): number;

  describe(): string {
    return `${this.constructor.name}: ${this.area()}`;
  }
}

export class Square extends Shape {
  constructor(private side: number) {
    super();
  }

  area(): number {
    return this.side * this.side;
  }
}
