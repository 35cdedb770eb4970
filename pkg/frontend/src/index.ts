export {
  Container,
  ContainerFormatError,
  NdArray,
  loadContainer,
  parseContainer,
  serializeContainer,
  writeContainer,
  requireArray,
  MAGIC,
} from "./container";
export { FigureKind, FigureSpec, defaultSpec, renderFigure } from "./render";
export { main, parseArgs, UsageError } from "./cli";
