// Drag-to-selection mapping. At the default 1:1 zoom one display pixel is
// one spectrogram column, so pixels convert to seconds via columns-per-second.

export interface Selection {
  start_s: number
  end_s: number
}

export interface ClipGeometry {
  durationS: number
  /** native spectrogram columns = displayed pixels at 1:1 zoom */
  width: number
}

export function columnsPerSecond(geometry: ClipGeometry): number {
  return geometry.width / geometry.durationS
}

export function pixelToSeconds(px: number, geometry: ClipGeometry): number {
  const clamped = Math.min(Math.max(px, 0), geometry.width)
  return clamped / columnsPerSecond(geometry)
}

export function secondsToPixel(s: number, geometry: ClipGeometry): number {
  return s * columnsPerSecond(geometry)
}

/**
 * Normalize a drag gesture into a Selection. Reversed drags (right to left)
 * are flipped, endpoints are clamped to the clip, and drags narrower than
 * one column return null (ignored).
 */
export function dragToSelection(
  fromPx: number,
  toPx: number,
  geometry: ClipGeometry,
): Selection | null {
  const lo = Math.min(fromPx, toPx)
  const hi = Math.max(fromPx, toPx)
  const loClamped = Math.min(Math.max(lo, 0), geometry.width)
  const hiClamped = Math.min(Math.max(hi, 0), geometry.width)
  if (hiClamped - loClamped < 1) return null
  return {
    start_s: pixelToSeconds(loClamped, geometry),
    end_s: pixelToSeconds(hiClamped, geometry),
  }
}

export type SelectionListener = (selection: Selection | null) => void

/**
 * Attaches mouse handlers to the spectrogram view and reports drag
 * selections, painting a highlight box while dragging.
 */
export class SelectionController {
  private geometry: ClipGeometry | null = null
  private dragStart: number | null = null
  private highlight: HTMLDivElement

  constructor(
    private readonly view: HTMLElement,
    private readonly onSelect: SelectionListener,
  ) {
    this.highlight = view.ownerDocument.createElement('div')
    this.highlight.className = 'selection-highlight'
    this.highlight.style.display = 'none'
    view.appendChild(this.highlight)
    view.addEventListener('mousedown', this.onMouseDown)
    view.addEventListener('mousemove', this.onMouseMove)
    view.addEventListener('mouseup', this.onMouseUp)
  }

  setGeometry(geometry: ClipGeometry | null): void {
    this.geometry = geometry
    this.clearHighlight()
  }

  get selectionBox(): HTMLDivElement {
    return this.highlight
  }

  private viewX(event: MouseEvent): number {
    const rect = this.view.getBoundingClientRect()
    return event.clientX - rect.left
  }

  private onMouseDown = (event: MouseEvent): void => {
    if (!this.geometry) return
    this.dragStart = this.viewX(event)
  }

  private onMouseMove = (event: MouseEvent): void => {
    if (this.dragStart === null || !this.geometry) return
    this.paintHighlight(this.dragStart, this.viewX(event))
  }

  private onMouseUp = (event: MouseEvent): void => {
    if (this.dragStart === null || !this.geometry) return
    const selection = dragToSelection(this.dragStart, this.viewX(event), this.geometry)
    this.dragStart = null
    if (selection === null) {
      this.clearHighlight()
      return // zero-width drag: ignored, previous selection stands
    }
    this.paintHighlight(
      secondsToPixel(selection.start_s, this.geometry),
      secondsToPixel(selection.end_s, this.geometry),
    )
    this.onSelect(selection)
  }

  private paintHighlight(fromPx: number, toPx: number): void {
    if (!this.geometry) return
    const lo = Math.max(0, Math.min(fromPx, toPx))
    const hi = Math.min(this.geometry.width, Math.max(fromPx, toPx))
    this.highlight.style.display = 'block'
    this.highlight.style.left = `${lo}px`
    this.highlight.style.width = `${hi - lo}px`
  }

  private clearHighlight(): void {
    this.highlight.style.display = 'none'
  }
}
