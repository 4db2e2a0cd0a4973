// Tick overlay: one blue numeral per tick along the bottom edge, vertical
// lines at register shifts. Positions mirror the analysis response exactly.

import type { AnalysisResponse } from './api.js'

export const REGISTER_NAMES: Record<number, string> = {
  0: 'Chest',
  1: 'Mix',
  2: 'HeadMix',
  3: 'Head',
}

export class TickOverlay {
  constructor(private readonly layer: HTMLElement) {
    layer.classList.add('tick-overlay')
  }

  clear(): void {
    this.layer.replaceChildren()
  }

  render(analysis: AnalysisResponse, selectionStartPx: number): void {
    this.clear()
    const doc = this.layer.ownerDocument
    for (const marker of analysis.shift_markers) {
      const line = doc.createElement('div')
      line.className = 'shift-marker'
      line.style.left = `${selectionStartPx + marker}px`
      this.layer.appendChild(line)
    }
    for (const tick of analysis.ticks) {
      const numeral = doc.createElement('span')
      numeral.className = 'tick-label'
      numeral.textContent = String(tick.label)
      numeral.style.left = `${selectionStartPx + tick.x}px`
      numeral.title = `${REGISTER_NAMES[tick.label]} (${(tick.confidence * 100).toFixed(1)}%)`
      numeral.dataset.x = String(tick.x)
      numeral.dataset.label = String(tick.label)
      this.layer.appendChild(numeral)
    }
  }

  get tickElements(): HTMLElement[] {
    return Array.from(this.layer.querySelectorAll<HTMLElement>('.tick-label'))
  }

  get markerElements(): HTMLElement[] {
    return Array.from(this.layer.querySelectorAll<HTMLElement>('.shift-marker'))
  }
}

export function renderLegend(container: HTMLElement): void {
  container.replaceChildren()
  const doc = container.ownerDocument
  for (const [code, name] of Object.entries(REGISTER_NAMES)) {
    const item = doc.createElement('span')
    item.className = 'legend-item'
    item.textContent = `${code} = ${name}`
    container.appendChild(item)
  }
}
