import { describe, expect, it } from 'vitest'

import {
  columnsPerSecond,
  dragToSelection,
  pixelToSeconds,
  secondsToPixel,
  SelectionController,
  type ClipGeometry,
  type Selection,
} from '../src/selection.js'
import { drag, mouse } from './helpers.js'

const geometry: ClipGeometry = { durationS: 2.0, width: 200 }

describe('pixel/seconds mapping', () => {
  it('round-trips within one column', () => {
    for (const px of [0, 1, 37, 99, 200]) {
      const back = secondsToPixel(pixelToSeconds(px, geometry), geometry)
      expect(Math.abs(back - px)).toBeLessThanOrEqual(1)
    }
  })

  it('uses columns per second', () => {
    expect(columnsPerSecond(geometry)).toBe(100)
    expect(pixelToSeconds(50, geometry)).toBeCloseTo(0.5)
  })
})

describe('dragToSelection', () => {
  it('maps a full-width drag to the whole clip', () => {
    const sel = dragToSelection(0, 200, geometry)!
    expect(sel.start_s).toBeCloseTo(0)
    expect(sel.end_s).toBeCloseTo(2.0)
  })

  it('normalizes reversed drags', () => {
    const sel = dragToSelection(150, 30, geometry)!
    expect(sel.start_s).toBeLessThan(sel.end_s)
    expect(sel.start_s).toBeCloseTo(0.3)
    expect(sel.end_s).toBeCloseTo(1.5)
  })

  it('clamps drags past the right edge to the clip duration', () => {
    const sel = dragToSelection(100, 450, geometry)!
    expect(sel.end_s).toBeCloseTo(2.0)
  })

  it('clamps drags past the left edge to zero', () => {
    const sel = dragToSelection(-60, 80, geometry)!
    expect(sel.start_s).toBeCloseTo(0)
  })

  it('ignores zero-width drags', () => {
    expect(dragToSelection(42, 42, geometry)).toBeNull()
    expect(dragToSelection(42, 42.5, geometry)).toBeNull()
  })
})

describe('SelectionController', () => {
  function setup() {
    document.body.innerHTML = '<div id="view"></div>'
    const view = document.getElementById('view') as HTMLElement
    const got: Array<Selection | null> = []
    const controller = new SelectionController(view, (sel) => got.push(sel))
    controller.setGeometry(geometry)
    return { view, got, controller }
  }

  it('emits a selection for a drag gesture', () => {
    const { view, got } = setup()
    drag(view, 20, 120)
    expect(got).toHaveLength(1)
    expect(got[0]!.start_s).toBeCloseTo(0.2)
    expect(got[0]!.end_s).toBeCloseTo(1.2)
  })

  it('paints the highlight box over the dragged range', () => {
    const { view, controller } = setup()
    drag(view, 30, 90)
    expect(controller.selectionBox.style.display).toBe('block')
    expect(controller.selectionBox.style.left).toBe('30px')
    expect(controller.selectionBox.style.width).toBe('60px')
  })

  it('does not emit for zero-width drags', () => {
    const { view, got } = setup()
    mouse(view, 'mousedown', 50)
    mouse(view, 'mouseup', 50)
    expect(got).toHaveLength(0)
  })

  it('ignores gestures before a clip is loaded', () => {
    document.body.innerHTML = '<div id="view"></div>'
    const view = document.getElementById('view') as HTMLElement
    const got: Array<Selection | null> = []
    new SelectionController(view, (sel) => got.push(sel))
    drag(view, 10, 60)
    expect(got).toHaveLength(0)
  })
})
